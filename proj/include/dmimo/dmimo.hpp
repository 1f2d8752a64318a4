#pragma once

#include "dmimo/channel.hpp"
#include "dmimo/errors.hpp"
#include "dmimo/experiment.hpp"
#include "dmimo/io.hpp"
#include "dmimo/mimo_math.hpp"
#include "dmimo/phase1.hpp"
#include "dmimo/phase2.hpp"
#include "dmimo/random.hpp"
#include "dmimo/scenario.hpp"
#include "dmimo/timing.hpp"
