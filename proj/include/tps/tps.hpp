#pragma once

#include "tps/bootstrap.hpp"
#include "tps/calibration.hpp"
#include "tps/diagnostics.hpp"
#include "tps/engine.hpp"
#include "tps/errors.hpp"
#include "tps/jsonl.hpp"
#include "tps/rng.hpp"
#include "tps/score_family.hpp"
#include "tps/synthetic.hpp"
#include "tps/trajectory.hpp"
#include "tps/weights.hpp"
