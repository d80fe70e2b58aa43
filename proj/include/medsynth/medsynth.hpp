#pragma once

#include "medsynth/annotate.hpp"
#include "medsynth/asset_store.hpp"
#include "medsynth/assets.hpp"
#include "medsynth/augment.hpp"
#include "medsynth/body_model.hpp"
#include "medsynth/clothing.hpp"
#include "medsynth/config_io.hpp"
#include "medsynth/dataset_eval.hpp"
#include "medsynth/error.hpp"
#include "medsynth/fixtures.hpp"
#include "medsynth/generate.hpp"
#include "medsynth/image.hpp"
#include "medsynth/manifest.hpp"
#include "medsynth/mesh.hpp"
#include "medsynth/mesh_primitives.hpp"
#include "medsynth/png_io.hpp"
#include "medsynth/render.hpp"
#include "medsynth/rng.hpp"
#include "medsynth/scene.hpp"
