// Copyright 2026 The dbf Authors
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

// Umbrella header for the core library.

#ifndef DBF_DBF_HPP_
#define DBF_DBF_HPP_

#include "dbf/errors.hpp"
#include "dbf/model.hpp"
#include "dbf/optimizer.hpp"
#include "dbf/perturbation.hpp"
#include "dbf/phasor.hpp"
#include "dbf/protocol.hpp"
#include "dbf/rng.hpp"
#include "dbf/scalability.hpp"
#include "dbf/tracking.hpp"

#endif  // DBF_DBF_HPP_
