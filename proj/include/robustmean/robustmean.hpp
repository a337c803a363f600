#pragma once

#include "robustmean/bench.hpp"
#include "robustmean/distributions.hpp"
#include "robustmean/errors.hpp"
#include "robustmean/estimators.hpp"
#include "robustmean/io.hpp"
#include "robustmean/rng.hpp"
#include "robustmean/samples.hpp"
#include "robustmean/tournament.hpp"
#include "robustmean/vec.hpp"
