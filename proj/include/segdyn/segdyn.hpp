#pragma once

#include "segdyn/circular.hpp"
#include "segdyn/dynamics.hpp"
#include "segdyn/errors.hpp"
#include "segdyn/io.hpp"
#include "segdyn/ode.hpp"
#include "segdyn/parallel.hpp"
#include "segdyn/poincare.hpp"
#include "segdyn/potential.hpp"
#include "segdyn/potential_oracle.hpp"
#include "segdyn/propagate.hpp"
#include "segdyn/reconstruction.hpp"
#include "segdyn/units.hpp"
