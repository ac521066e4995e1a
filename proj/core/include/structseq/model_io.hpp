// Copyright 2026 The structseq Authors
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

#include <iosfwd>
#include <variant>

#include "structseq/scorer.hpp"

namespace structseq {

// LINEAR <order> <K> <d> <dim>, then dim values one per line.
void write_linear_model(std::ostream& out, const LinearModel& model);
// SDNN <order> <K> <d> <L+1> <size0> ... <sizeL+1>, then per layer the weight
// matrix row-major followed by the bias vector, one value per line.
void write_network_model(std::ostream& out, const NetworkModel& model);

LinearModel read_linear_model(std::istream& in);
NetworkModel read_network_model(std::istream& in);

using AnyModel = std::variant<LinearModel, NetworkModel>;
// Dispatches on the header keyword.
AnyModel read_model(std::istream& in);

}  // namespace structseq
