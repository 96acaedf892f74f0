// SPDX-License-Identifier: Apache-2.0
//
// hybeam - hybrid beamforming simulation library for multiuser MIMO-OFDM
// Copyright (C) 2026 hybeam contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HYBEAM_HYBEAM_HPP
#define HYBEAM_HYBEAM_HPP

#include "ber.hpp"
#include "channel.hpp"
#include "cmdd.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "digital.hpp"
#include "framework.hpp"
#include "harness.hpp"
#include "manifold.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "socp.hpp"
#include "types.hpp"

#endif
