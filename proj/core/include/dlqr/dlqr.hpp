#pragma once

#include "dlqr/control.hpp"
#include "dlqr/descriptor.hpp"
#include "dlqr/errors.hpp"
#include "dlqr/fem.hpp"
#include "dlqr/hermite.hpp"
#include "dlqr/integrators.hpp"
#include "dlqr/linalg.hpp"
#include "dlqr/oracle.hpp"
#include "dlqr/pipeline.hpp"
#include "dlqr/riccati.hpp"
#include "dlqr/signals.hpp"
#include "dlqr/simulate.hpp"
#include "dlqr/time_grid.hpp"
#include "dlqr/weierstrass.hpp"
