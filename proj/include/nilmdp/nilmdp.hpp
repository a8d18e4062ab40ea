// Copyright 2026 The nilm-dp Authors.
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

#ifndef NILMDP_NILMDP_HPP_
#define NILMDP_NILMDP_HPP_

#include "nilmdp/bounds.hpp"
#include "nilmdp/core.hpp"
#include "nilmdp/data_io.hpp"
#include "nilmdp/dp.hpp"
#include "nilmdp/experiment.hpp"
#include "nilmdp/hierarchy.hpp"
#include "nilmdp/inference.hpp"
#include "nilmdp/random.hpp"
#include "nilmdp/solver.hpp"

#endif  // NILMDP_NILMDP_HPP_
