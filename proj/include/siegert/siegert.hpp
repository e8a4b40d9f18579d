// Umbrella header.

#pragma once

#include "siegert/contour.hpp"
#include "siegert/dynamics.hpp"
#include "siegert/errors.hpp"
#include "siegert/feshbach.hpp"
#include "siegert/hermiticity.hpp"
#include "siegert/model.hpp"
#include "siegert/parallel.hpp"
#include "siegert/pendulum.hpp"
#include "siegert/poles.hpp"
#include "siegert/quadrature.hpp"
#include "siegert/time_series.hpp"
#include "siegert/transfer.hpp"
