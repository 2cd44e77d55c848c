// Copyright 2026 The qimg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qimg/bench.hpp"
#include "qimg/cnn.hpp"
#include "qimg/dataset.hpp"
#include "qimg/encoders.hpp"
#include "qimg/error.hpp"
#include "qimg/image.hpp"
#include "qimg/io.hpp"
#include "qimg/metrics.hpp"
#include "qimg/mlp.hpp"
#include "qimg/netpbm.hpp"
#include "qimg/noise.hpp"
#include "qimg/rng.hpp"
#include "qimg/statevector.hpp"
#include "qimg/train.hpp"
