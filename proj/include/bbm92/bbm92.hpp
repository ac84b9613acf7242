// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header for the toolkit.

#include "bbm92/attack.hpp"
#include "bbm92/error.hpp"
#include "bbm92/fock.hpp"
#include "bbm92/linalg.hpp"
#include "bbm92/optimize.hpp"
#include "bbm92/povm.hpp"
#include "bbm92/rates.hpp"
#include "bbm92/rng.hpp"
#include "bbm92/sim.hpp"
#include "bbm92/table.hpp"
