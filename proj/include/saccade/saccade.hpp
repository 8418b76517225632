#pragma once

#include "saccade/agent.hpp"
#include "saccade/bench.hpp"
#include "saccade/config.hpp"
#include "saccade/episode.hpp"
#include "saccade/errors.hpp"
#include "saccade/grid.hpp"
#include "saccade/inference.hpp"
#include "saccade/ingest.hpp"
#include "saccade/model.hpp"
#include "saccade/planner.hpp"
#include "saccade/random.hpp"
#include "saccade/render.hpp"
#include "saccade/serve.hpp"
#include "saccade/simulator.hpp"
#include "saccade/tcp.hpp"
