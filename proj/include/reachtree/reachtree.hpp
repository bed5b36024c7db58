#pragma once

// Umbrella header: the whole adaptive target-generation engine.

#include "reachtree/bandit.hpp"
#include "reachtree/config.hpp"
#include "reachtree/errors.hpp"
#include "reachtree/geometry.hpp"
#include "reachtree/ingest.hpp"
#include "reachtree/io.hpp"
#include "reachtree/kinematics.hpp"
#include "reachtree/mcts.hpp"
#include "reachtree/mdp.hpp"
#include "reachtree/player.hpp"
#include "reachtree/prospects.hpp"
#include "reachtree/reward.hpp"
#include "reachtree/rng.hpp"
#include "reachtree/session.hpp"
#include "reachtree/sim.hpp"
#include "reachtree/snapshot.hpp"
#include "reachtree/spawner.hpp"
#include "reachtree/text.hpp"
