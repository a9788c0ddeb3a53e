#pragma once

// Dormand-Prince 8(5,3) embedded Runge-Kutta pair with 7th-order dense output,
// after Hairer, Norsett & Wanner, "Solving Ordinary Differential Equations I",
// 2nd ed., Springer (1993), code DOP853.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace segdyn {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace dop853 {

inline constexpr double c2 = 0.526001519587677318785587544488E-01;
inline constexpr double c3 = 0.789002279381515978178381316732E-01;
inline constexpr double c4 = 0.118350341907227396726757197510E+00;
inline constexpr double c5 = 0.281649658092772603273242802490E+00;
inline constexpr double c6 = 0.333333333333333333333333333333E+00;
inline constexpr double c7 = 0.25E+00;
inline constexpr double c8 = 0.307692307692307692307692307692E+00;
inline constexpr double c9 = 0.651282051282051282051282051282E+00;
inline constexpr double c10 = 0.6E+00;
inline constexpr double c11 = 0.857142857142857142857142857142E+00;
inline constexpr double c14 = 0.1E+00;
inline constexpr double c15 = 0.2E+00;
inline constexpr double c16 = 0.777777777777777777777777777778E+00;

inline constexpr double b1 = 5.42937341165687622380535766363E-2;
inline constexpr double b6 = 4.45031289275240888144113950566E0;
inline constexpr double b7 = 1.89151789931450038304281599044E0;
inline constexpr double b8 = -5.8012039600105847814672114227E0;
inline constexpr double b9 = 3.1116436695781989440891606237E-1;
inline constexpr double b10 = -1.52160949662516078556178806805E-1;
inline constexpr double b11 = 2.01365400804030348374776537501E-1;
inline constexpr double b12 = 4.47106157277725905176885569043E-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512E+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547E+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412E-01;

inline constexpr double er1 = 0.1312004499419488073250102996E-01;
inline constexpr double er6 = -0.1225156446376204440720569753E+01;
inline constexpr double er7 = -0.4957589496572501915214079952E+00;
inline constexpr double er8 = 0.1664377182454986536961530415E+01;
inline constexpr double er9 = -0.3503288487499736816886487290E+00;
inline constexpr double er10 = 0.3341791187130174790297318841E+00;
inline constexpr double er11 = 0.8192320648511571246570742613E-01;
inline constexpr double er12 = -0.2235530786388629525884427845E-01;

inline constexpr double a21 = 5.26001519587677318785587544488E-2;
inline constexpr double a31 = 1.97250569845378994544595329183E-2;
inline constexpr double a32 = 5.91751709536136983633785987549E-2;
inline constexpr double a41 = 2.95875854768068491816892993775E-2;
inline constexpr double a43 = 8.87627564304205475450678981324E-2;
inline constexpr double a51 = 2.41365134159266685502369798665E-1;
inline constexpr double a53 = -8.84549479328286085344864962717E-1;
inline constexpr double a54 = 9.24834003261792003115737966543E-1;
inline constexpr double a61 = 3.7037037037037037037037037037E-2;
inline constexpr double a64 = 1.70828608729473871279604482173E-1;
inline constexpr double a65 = 1.25467687566822425016691814123E-1;
inline constexpr double a71 = 3.7109375E-2;
inline constexpr double a74 = 1.70252211019544039314978060272E-1;
inline constexpr double a75 = 6.02165389804559606850219397283E-2;
inline constexpr double a76 = -1.7578125E-2;
inline constexpr double a81 = 3.70920001185047927108779319836E-2;
inline constexpr double a84 = 1.70383925712239993810214054705E-1;
inline constexpr double a85 = 1.07262030446373284651809199168E-1;
inline constexpr double a86 = -1.53194377486244017527936158236E-2;
inline constexpr double a87 = 8.27378916381402288758473766002E-3;
inline constexpr double a91 = 6.24110958716075717114429577812E-1;
inline constexpr double a94 = -3.36089262944694129406857109825E0;
inline constexpr double a95 = -8.68219346841726006818189891453E-1;
inline constexpr double a96 = 2.75920996994467083049415600797E1;
inline constexpr double a97 = 2.01540675504778934086186788979E1;
inline constexpr double a98 = -4.34898841810699588477366255144E1;
inline constexpr double a101 = 4.77662536438264365890433908527E-1;
inline constexpr double a104 = -2.48811461997166764192642586468E0;
inline constexpr double a105 = -5.90290826836842996371446475743E-1;
inline constexpr double a106 = 2.12300514481811942347288949897E1;
inline constexpr double a107 = 1.52792336328824235832596922938E1;
inline constexpr double a108 = -3.32882109689848629194453265587E1;
inline constexpr double a109 = -2.03312017085086261358222928593E-2;
inline constexpr double a111 = -9.3714243008598732571704021658E-1;
inline constexpr double a114 = 5.18637242884406370830023853209E0;
inline constexpr double a115 = 1.09143734899672957818500254654E0;
inline constexpr double a116 = -8.14978701074692612513997267357E0;
inline constexpr double a117 = -1.85200656599969598641566180701E1;
inline constexpr double a118 = 2.27394870993505042818970056734E1;
inline constexpr double a119 = 2.49360555267965238987089396762E0;
inline constexpr double a1110 = -3.0467644718982195003823669022E0;
inline constexpr double a121 = 2.27331014751653820792359768449E0;
inline constexpr double a124 = -1.05344954667372501984066689879E1;
inline constexpr double a125 = -2.00087205822486249909675718444E0;
inline constexpr double a126 = -1.79589318631187989172765950534E1;
inline constexpr double a127 = 2.79488845294199600508499808837E1;
inline constexpr double a128 = -2.85899827713502369474065508674E0;
inline constexpr double a129 = -8.87285693353062954433549289258E0;
inline constexpr double a1210 = 1.23605671757943030647266201528E1;
inline constexpr double a1211 = 6.43392746015763530355970484046E-1;

inline constexpr double a141 = 5.61675022830479523392909219681E-2;
inline constexpr double a147 = 2.53500210216624811088794765333E-1;
inline constexpr double a148 = -2.46239037470802489917441475441E-1;
inline constexpr double a149 = -1.24191423263816360469010140626E-1;
inline constexpr double a1410 = 1.5329179827876569731206322685E-1;
inline constexpr double a1411 = 8.20105229563468988491666602057E-3;
inline constexpr double a1412 = 7.56789766054569976138603589584E-3;
inline constexpr double a1413 = -8.298E-3;
inline constexpr double a151 = 3.18346481635021405060768473261E-2;
inline constexpr double a156 = 2.83009096723667755288322961402E-2;
inline constexpr double a157 = 5.35419883074385676223797384372E-2;
inline constexpr double a158 = -5.49237485713909884646569340306E-2;
inline constexpr double a1511 = -1.08347328697249322858509316994E-4;
inline constexpr double a1512 = 3.82571090835658412954920192323E-4;
inline constexpr double a1513 = -3.40465008687404560802977114492E-4;
inline constexpr double a1514 = 1.41312443674632500278074618366E-1;
inline constexpr double a161 = -4.28896301583791923408573538692E-1;
inline constexpr double a166 = -4.69762141536116384314449447206E0;
inline constexpr double a167 = 7.68342119606259904184240953878E0;
inline constexpr double a168 = 4.06898981839711007970213554331E0;
inline constexpr double a169 = 3.56727187455281109270669543021E-1;
inline constexpr double a1613 = -1.39902416515901462129418009734E-3;
inline constexpr double a1614 = 2.9475147891527723389556272149E0;
inline constexpr double a1615 = -9.15095847217987001081870187138E0;

inline constexpr double d41 = -0.84289382761090128651353491142E+01;
inline constexpr double d46 = 0.56671495351937776962531783590E+00;
inline constexpr double d47 = -0.30689499459498916912797304727E+01;
inline constexpr double d48 = 0.23846676565120698287728149680E+01;
inline constexpr double d49 = 0.21170345824450282767155149946E+01;
inline constexpr double d410 = -0.87139158377797299206789907490E+00;
inline constexpr double d411 = 0.22404374302607882758541771650E+01;
inline constexpr double d412 = 0.63157877876946881815570249290E+00;
inline constexpr double d413 = -0.88990336451333310820698117400E-01;
inline constexpr double d414 = 0.18148505520854727256656404962E+02;
inline constexpr double d415 = -0.91946323924783554000451984436E+01;
inline constexpr double d416 = -0.44360363875948939664310572000E+01;
inline constexpr double d51 = 0.10427508642579134603413151009E+02;
inline constexpr double d56 = 0.24228349177525818288430175319E+03;
inline constexpr double d57 = 0.16520045171727028198505394887E+03;
inline constexpr double d58 = -0.37454675472269020279518312152E+03;
inline constexpr double d59 = -0.22113666853125306036270938578E+02;
inline constexpr double d510 = 0.77334326684722638389603898808E+01;
inline constexpr double d511 = -0.30674084731089398182061213626E+02;
inline constexpr double d512 = -0.93321305264302278729567221706E+01;
inline constexpr double d513 = 0.15697238121770843886131091075E+02;
inline constexpr double d514 = -0.31139403219565177677282850411E+02;
inline constexpr double d515 = -0.93529243588444783865713862664E+01;
inline constexpr double d516 = 0.35816841486394083752465898540E+02;
inline constexpr double d61 = 0.19985053242002433820987653617E+02;
inline constexpr double d66 = -0.38703730874935176555105901742E+03;
inline constexpr double d67 = -0.18917813819516756882830838328E+03;
inline constexpr double d68 = 0.52780815920542364900561016686E+03;
inline constexpr double d69 = -0.11573902539959630126141871134E+02;
inline constexpr double d610 = 0.68812326946963000169666922661E+01;
inline constexpr double d611 = -0.10006050966910838403183860980E+01;
inline constexpr double d612 = 0.77771377980534432092869265740E+00;
inline constexpr double d613 = -0.27782057523535084065932004339E+01;
inline constexpr double d614 = -0.60196695231264120758267380846E+02;
inline constexpr double d615 = 0.84320405506677161018159903784E+02;
inline constexpr double d616 = 0.11992291136182789328035130030E+02;
inline constexpr double d71 = -0.25693933462703749003312586129E+02;
inline constexpr double d76 = -0.15418974869023643374053993627E+03;
inline constexpr double d77 = -0.23152937917604549567536039109E+03;
inline constexpr double d78 = 0.35763911791061412378285349910E+03;
inline constexpr double d79 = 0.93405324183624310003907691704E+02;
inline constexpr double d710 = -0.37458323136451633156875139351E+02;
inline constexpr double d711 = 0.10409964950896230045147246184E+03;
inline constexpr double d712 = 0.29840293426660503123344363579E+02;
inline constexpr double d713 = -0.43533456590011143754432175058E+02;
inline constexpr double d714 = 0.96324553959188282948394950600E+02;
inline constexpr double d715 = -0.39177261675615439165231486172E+02;
inline constexpr double d716 = -0.14972683625798562581422125276E+03;

}  // namespace dop853

/// Continuous extension of one accepted step on [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 8> rc{};

  double t1() const { return t0 + h; }

  Vec<N> operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rc[0][i] +
             s * (rc[1][i] +
                  s1 * (rc[2][i] + s * (rc[3][i] + s1 * (rc[4][i] + s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
    }
    return y;
  }

  double component(std::size_t i, double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return rc[0][i] +
           s * (rc[1][i] +
                s1 * (rc[2][i] + s * (rc[3][i] + s1 * (rc[4][i] + s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
  }
};

struct StepperOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  double h_init = 0.0;  // 0: automatic
};

enum class StepStatus { accepted, step_underflow };

/// Forward-in-time DOP853 stepper. `Rhs` is callable as Vec<N>(double, const Vec<N>&);
/// non-finite derivatives are treated as a rejected step.
template <std::size_t N, class Rhs>
class Dop853 {
 public:
  Dop853(Rhs rhs, double t0, const Vec<N>& y0, StepperOptions opts = {})
      : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(y0) {
    k1_ = rhs_(t_, y_);
    ++n_eval_;
    h_ = opts_.h_init > 0.0 ? opts_.h_init : initial_step();
  }

  double t() const { return t_; }
  const Vec<N>& y() const { return y_; }
  const Vec<N>& dydt() const { return k1_; }
  double t_prev() const { return t_prev_; }
  const Vec<N>& y_prev() const { return y_prev_; }
  double step_size() const { return h_; }
  std::size_t evaluations() const { return n_eval_; }
  std::size_t accepted() const { return n_accept_; }
  std::size_t rejected() const { return n_reject_; }

  /// Advance by one accepted step without passing t_limit.
  StepStatus step(double t_limit) {
    constexpr double kSafe = 0.9;
    constexpr double kFacMin = 1.0 / 3.0;  // fac1
    constexpr double kFacMax = 6.0;        // fac2
    constexpr double kUround = 2.3e-16;
    const double expo1 = 1.0 / 8.0;
    while (true) {
      if (0.1 * std::abs(h_) <= std::abs(t_) * kUround || h_ < 1e-300) return StepStatus::step_underflow;
      double h = std::min(h_, opts_.h_max);
      if (t_ + 1.01 * h >= t_limit) h = t_limit - t_;
      double err = attempt(h);
      if (std::isfinite(err) && err <= 1.0) {
        const double fac11 = std::pow(err, expo1);
        const double fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac11 / kSafe));
        double hnew = h / fac;
        if (rejected_last_) hnew = std::min(hnew, h);
        rejected_last_ = false;
        accept(h);
        h_ = std::min(hnew, opts_.h_max);
        return StepStatus::accepted;
      }
      ++n_reject_;
      rejected_last_ = true;
      if (std::isfinite(err)) {
        const double fac11 = std::pow(err, expo1);
        h_ = h / std::min(1.0 / kFacMin, fac11 / kSafe);
      } else {
        h_ = 0.2 * h;
      }
    }
  }

  /// Dense output for the last accepted step. Costs three extra evaluations
  /// the first time it is requested for a given step.
  const DenseSegment<N>& dense() {
    if (!dense_ready_) build_dense();
    return dense_;
  }

 private:
  double initial_step() {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opts_.abs_tol + opts_.rel_tol * std::abs(y_[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    const double hmax = std::isfinite(opts_.h_max) ? opts_.h_max : 1e3;
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    Vec<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h * k1_[i];
    const Vec<N> f1 = rhs_(t_ + h, y1);
    ++n_eval_;
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = (f1[i] - k1_[i]) / (opts_.abs_tol + opts_.rel_tol * std::abs(y_[i]));
      der2 += q * q;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.125);
    double out = std::min(100.0 * h, std::min(h1, hmax));
    if (!std::isfinite(out) || out <= 0.0) out = 1e-6;
    return out;
  }

  // Twelve-stage step of size h from (t_, y_); returns the scaled error norm.
  double attempt(double h) {
    using namespace dop853;
    auto stage = [&](auto&& combine, double c) {
      Vec<N> w;
      for (std::size_t i = 0; i < N; ++i) w[i] = y_[i] + h * combine(i);
      ++n_eval_;
      return rhs_(t_ + c * h, w);
    };
    k2_ = stage([&](std::size_t i) { return a21 * k1_[i]; }, c2);
    k3_ = stage([&](std::size_t i) { return a31 * k1_[i] + a32 * k2_[i]; }, c3);
    k4_ = stage([&](std::size_t i) { return a41 * k1_[i] + a43 * k3_[i]; }, c4);
    k5_ = stage([&](std::size_t i) { return a51 * k1_[i] + a53 * k3_[i] + a54 * k4_[i]; }, c5);
    k6_ = stage([&](std::size_t i) { return a61 * k1_[i] + a64 * k4_[i] + a65 * k5_[i]; }, c6);
    k7_ = stage([&](std::size_t i) { return a71 * k1_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]; }, c7);
    k8_ = stage(
        [&](std::size_t i) { return a81 * k1_[i] + a84 * k4_[i] + a85 * k5_[i] + a86 * k6_[i] + a87 * k7_[i]; },
        c8);
    k9_ = stage(
        [&](std::size_t i) {
          return a91 * k1_[i] + a94 * k4_[i] + a95 * k5_[i] + a96 * k6_[i] + a97 * k7_[i] + a98 * k8_[i];
        },
        c9);
    k10_ = stage(
        [&](std::size_t i) {
          return a101 * k1_[i] + a104 * k4_[i] + a105 * k5_[i] + a106 * k6_[i] + a107 * k7_[i] + a108 * k8_[i] +
                 a109 * k9_[i];
        },
        c10);
    k11_ = stage(
        [&](std::size_t i) {
          return a111 * k1_[i] + a114 * k4_[i] + a115 * k5_[i] + a116 * k6_[i] + a117 * k7_[i] + a118 * k8_[i] +
                 a119 * k9_[i] + a1110 * k10_[i];
        },
        c11);
    k12_ = stage(
        [&](std::size_t i) {
          return a121 * k1_[i] + a124 * k4_[i] + a125 * k5_[i] + a126 * k6_[i] + a127 * k7_[i] + a128 * k8_[i] +
                 a129 * k9_[i] + a1210 * k10_[i] + a1211 * k11_[i];
        },
        1.0);

    double err = 0.0, err2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      bsum_[i] = b1 * k1_[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] + b9 * k9_[i] + b10 * k10_[i] +
                 b11 * k11_[i] + b12 * k12_[i];
      ynew_[i] = y_[i] + h * bsum_[i];
      const double sk = 1.0 / (opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i])));
      double q = (bsum_[i] - bhh1 * k1_[i] - bhh2 * k9_[i] - bhh3 * k12_[i]) * sk;
      err2 += q * q;
      q = (er1 * k1_[i] + er6 * k6_[i] + er7 * k7_[i] + er8 * k8_[i] + er9 * k9_[i] + er10 * k10_[i] +
           er11 * k11_[i] + er12 * k12_[i]) *
          sk;
      err += q * q;
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err * std::sqrt(1.0 / (deno * static_cast<double>(N)));
  }

  void accept(double h) {
    fnew_ = rhs_(t_ + h, ynew_);
    ++n_eval_;
    y_prev_ = y_;
    k1_prev_ = k1_;
    t_prev_ = t_;
    h_last_ = h;
    y_ = ynew_;
    k1_ = fnew_;
    t_ += h;
    dense_ready_ = false;
    ++n_accept_;
  }

  void build_dense() {
    using namespace dop853;
    const double h = h_last_;
    const Vec<N>& y0 = y_prev_;
    const Vec<N>& f0 = k1_prev_;
    DenseSegment<N>& ds = dense_;
    ds.t0 = t_prev_;
    ds.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      ds.rc[0][i] = y0[i];
      const double ydiff = y_[i] - y0[i];
      ds.rc[1][i] = ydiff;
      const double bspl = h * f0[i] - ydiff;
      ds.rc[2][i] = bspl;
      ds.rc[3][i] = ydiff - h * k1_[i] - bspl;
      ds.rc[4][i] = d41 * f0[i] + d46 * k6_[i] + d47 * k7_[i] + d48 * k8_[i] + d49 * k9_[i] + d410 * k10_[i] +
                    d411 * k11_[i] + d412 * k12_[i];
      ds.rc[5][i] = d51 * f0[i] + d56 * k6_[i] + d57 * k7_[i] + d58 * k8_[i] + d59 * k9_[i] + d510 * k10_[i] +
                    d511 * k11_[i] + d512 * k12_[i];
      ds.rc[6][i] = d61 * f0[i] + d66 * k6_[i] + d67 * k7_[i] + d68 * k8_[i] + d69 * k9_[i] + d610 * k10_[i] +
                    d611 * k11_[i] + d612 * k12_[i];
      ds.rc[7][i] = d71 * f0[i] + d76 * k6_[i] + d77 * k7_[i] + d78 * k8_[i] + d79 * k9_[i] + d710 * k10_[i] +
                    d711 * k11_[i] + d712 * k12_[i];
    }
    const Vec<N>& f1 = k1_;  // derivative at the new point (stage 13)
    auto stage = [&](auto&& combine, double c) {
      Vec<N> w;
      for (std::size_t i = 0; i < N; ++i) w[i] = y0[i] + h * combine(i);
      ++n_eval_;
      return rhs_(t_prev_ + c * h, w);
    };
    const Vec<N> k14 = stage(
        [&](std::size_t i) {
          return a141 * f0[i] + a147 * k7_[i] + a148 * k8_[i] + a149 * k9_[i] + a1410 * k10_[i] + a1411 * k11_[i] +
                 a1412 * k12_[i] + a1413 * f1[i];
        },
        c14);
    const Vec<N> k15 = stage(
        [&](std::size_t i) {
          return a151 * f0[i] + a156 * k6_[i] + a157 * k7_[i] + a158 * k8_[i] + a1511 * k11_[i] + a1512 * k12_[i] +
                 a1513 * f1[i] + a1514 * k14[i];
        },
        c15);
    const Vec<N> k16 = stage(
        [&](std::size_t i) {
          return a161 * f0[i] + a166 * k6_[i] + a167 * k7_[i] + a168 * k8_[i] + a169 * k9_[i] + a1613 * f1[i] +
                 a1614 * k14[i] + a1615 * k15[i];
        },
        c16);
    for (std::size_t i = 0; i < N; ++i) {
      ds.rc[4][i] = h * (ds.rc[4][i] + d413 * f1[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
      ds.rc[5][i] = h * (ds.rc[5][i] + d513 * f1[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
      ds.rc[6][i] = h * (ds.rc[6][i] + d613 * f1[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
      ds.rc[7][i] = h * (ds.rc[7][i] + d713 * f1[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
    }
    dense_ready_ = true;
  }

  Rhs rhs_;
  StepperOptions opts_;
  double t_;
  Vec<N> y_;
  double h_ = 0.0;
  double t_prev_ = 0.0;
  double h_last_ = 0.0;
  Vec<N> y_prev_{}, k1_prev_{};
  Vec<N> k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{}, k8_{}, k9_{}, k10_{}, k11_{}, k12_{};
  Vec<N> bsum_{}, ynew_{}, fnew_{};
  DenseSegment<N> dense_{};
  bool dense_ready_ = false;
  bool rejected_last_ = false;
  std::size_t n_eval_ = 0, n_accept_ = 0, n_reject_ = 0;
};

}  // namespace segdyn
