// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "strgcl/error.hpp"
#include "strgcl/random.hpp"
#include "strgcl/binary_io.hpp"
#include "strgcl/linalg/matrix.hpp"
#include "strgcl/linalg/functions.hpp"
#include "strgcl/linalg/sparse.hpp"
#include "strgcl/autodiff/tape.hpp"
#include "strgcl/autodiff/grad_check.hpp"
#include "strgcl/graph/graph.hpp"
#include "strgcl/graph/sgr1.hpp"
#include "strgcl/graph/augment.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/rules/pca.hpp"
#include "strgcl/rules/rules.hpp"
#include "strgcl/model/model.hpp"
#include "strgcl/model/checkpoint.hpp"
#include "strgcl/model/embeddings.hpp"
#include "strgcl/losses/losses.hpp"
#include "strgcl/train/config.hpp"
#include "strgcl/train/adam.hpp"
#include "strgcl/train/trainer.hpp"
#include "strgcl/eval/metrics.hpp"
#include "strgcl/eval/kmeans.hpp"
#include "strgcl/eval/probe.hpp"
#include "strgcl/eval/error_profile.hpp"
#include "strgcl/eval/experiments.hpp"
#include "strgcl/eval/report.hpp"
#include "strgcl/selfcheck.hpp"
