#pragma once

#include "longrun/closed_form.hpp"
#include "longrun/config.hpp"
#include "longrun/eigen1d.hpp"
#include "longrun/errors.hpp"
#include "longrun/horizon.hpp"
#include "longrun/model.hpp"
#include "longrun/optimality.hpp"
#include "longrun/quadrature.hpp"
#include "longrun/riccati.hpp"
#include "longrun/rng.hpp"
#include "longrun/simulate.hpp"
