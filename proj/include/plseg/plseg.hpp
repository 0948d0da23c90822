#pragma once

#include "plseg/config.hpp"
#include "plseg/experiment.hpp"
#include "plseg/features.hpp"
#include "plseg/kdtree.hpp"
#include "plseg/loss.hpp"
#include "plseg/matrix.hpp"
#include "plseg/metrics.hpp"
#include "plseg/mlp.hpp"
#include "plseg/model_io.hpp"
#include "plseg/point_cloud.hpp"
#include "plseg/pseudo_labels.hpp"
#include "plseg/rng.hpp"
#include "plseg/subsample.hpp"
#include "plseg/synthetic.hpp"
#include "plseg/text_io.hpp"
#include "plseg/trainer.hpp"
#include "plseg/weak_labels.hpp"
