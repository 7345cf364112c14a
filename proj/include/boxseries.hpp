#pragma once

#include "boxseries/errors.hpp"
#include "boxseries/scalars.hpp"
#include "boxseries/polynomial.hpp"
#include "boxseries/expression.hpp"
#include "boxseries/hamiltonian.hpp"
#include "boxseries/series.hpp"
#include "boxseries/digits.hpp"
#include "boxseries/eigensolver.hpp"
#include "boxseries/oracles.hpp"
