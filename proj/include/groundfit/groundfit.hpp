#pragma once

#include "groundfit/types.hpp"
#include "groundfit/io.hpp"
#include "groundfit/scan.hpp"
#include "groundfit/simulate.hpp"
#include "groundfit/tangent.hpp"
#include "groundfit/ransac.hpp"
#include "groundfit/partition.hpp"
#include "groundfit/baselines.hpp"
#include "groundfit/pipeline.hpp"
#include "groundfit/eval.hpp"
