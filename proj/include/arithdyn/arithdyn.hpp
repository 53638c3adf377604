#pragma once

#include "arithdyn/equidist.hpp"
#include "arithdyn/mandelbrot.hpp"
#include "arithdyn/parse.hpp"
#include "arithdyn/symmetry.hpp"
