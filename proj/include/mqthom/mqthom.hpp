#pragma once

#include "mqthom/error.hpp"
#include "mqthom/scalar.hpp"
#include "mqthom/jet.hpp"
#include "mqthom/jet_matrix.hpp"
#include "mqthom/forms.hpp"
#include "mqthom/matforms.hpp"
#include "mqthom/gaussian.hpp"
#include "mqthom/mq.hpp"
#include "mqthom/oracle.hpp"
