#pragma once

#include "hjb/adam.hpp"
#include "hjb/baseline.hpp"
#include "hjb/common.hpp"
#include "hjb/config.hpp"
#include "hjb/evaluation.hpp"
#include "hjb/io.hpp"
#include "hjb/multi_agent.hpp"
#include "hjb/problem.hpp"
#include "hjb/quadcopter.hpp"
#include "hjb/rollout.hpp"
#include "hjb/scenarios.hpp"
#include "hjb/trainer.hpp"
#include "hjb/value_network.hpp"
