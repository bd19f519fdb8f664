/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "sessrank/baselines.hpp"
#include "sessrank/config.hpp"
#include "sessrank/error.hpp"
#include "sessrank/eval.hpp"
#include "sessrank/ingest.hpp"
#include "sessrank/neural/adam.hpp"
#include "sessrank/neural/checkpoint.hpp"
#include "sessrank/neural/features.hpp"
#include "sessrank/neural/grid_search.hpp"
#include "sessrank/neural/gru.hpp"
#include "sessrank/neural/hyper_config.hpp"
#include "sessrank/neural/model.hpp"
#include "sessrank/neural/ranker.hpp"
#include "sessrank/neural/train.hpp"
#include "sessrank/neural/vocabulary.hpp"
#include "sessrank/pipeline.hpp"
#include "sessrank/ranked_list.hpp"
#include "sessrank/rules.hpp"
#include "sessrank/session.hpp"
#include "sessrank/synth.hpp"
