// Copyright 2026 The SAA-inc Authors. All rights reserved.
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

#ifndef SAA_TOOLS_SELFTEST_H_
#define SAA_TOOLS_SELFTEST_H_

#include <cstdint>
#include <ostream>

namespace saa::tools {

// Quick invariant sweep over the engine, valuations, bandits and budget
// inference. Prints one line per check; true when all pass.
bool RunSelfTest(std::ostream& out, std::uint64_t seed);

}  // namespace saa::tools

#endif  // SAA_TOOLS_SELFTEST_H_
