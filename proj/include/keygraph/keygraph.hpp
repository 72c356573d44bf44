#pragma once

#include "keygraph/analysis.hpp"
#include "keygraph/config.hpp"
#include "keygraph/exactprob.hpp"
#include "keygraph/format.hpp"
#include "keygraph/model.hpp"
#include "keygraph/montecarlo.hpp"
#include "keygraph/rng.hpp"
#include "keygraph/sampler.hpp"
#include "keygraph/scaling.hpp"
