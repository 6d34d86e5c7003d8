#pragma once

#include "mfk/error.hpp"
#include "mfk/estimator.hpp"
#include "mfk/geometry.hpp"
#include "mfk/io.hpp"
#include "mfk/measure.hpp"
#include "mfk/oracles.hpp"
#include "mfk/plot.hpp"
#include "mfk/serialize.hpp"
