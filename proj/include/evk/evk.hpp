#pragma once

#include "evk/archetype.hpp"
#include "evk/augment.hpp"
#include "evk/calibrate.hpp"
#include "evk/config.hpp"
#include "evk/dataset.hpp"
#include "evk/error.hpp"
#include "evk/event.hpp"
#include "evk/io.hpp"
#include "evk/metrics.hpp"
#include "evk/pipeline.hpp"
#include "evk/plane.hpp"
#include "evk/random.hpp"
#include "evk/render.hpp"
#include "evk/simulator.hpp"
#include "evk/textures.hpp"
#include "evk/voxel.hpp"
