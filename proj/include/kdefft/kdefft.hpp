#pragma once

// Umbrella header.

#include "kdefft/errors.hpp"
#include "kdefft/estimators.hpp"
#include "kdefft/fft.hpp"
#include "kdefft/grid.hpp"
#include "kdefft/io.hpp"
#include "kdefft/kernel.hpp"
#include "kdefft/linalg.hpp"
#include "kdefft/ndarray.hpp"
