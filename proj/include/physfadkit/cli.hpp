// SPDX-License-Identifier: Apache-2.0
//
// physfadkit: coupled-dipole channel simulation toolkit
// Copyright (C) 2026 The physfadkit authors
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

#ifndef PHYSFADKIT_CLI_HPP
#define PHYSFADKIT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace physfadkit
{
    /// Entry point of the `physfadkit` tool. Returns the process exit code: 0 on success, 2 for
    /// bad input (schema, arguments, preconditions) and 3 for numerical failures.
    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

    // Worker count from --workers, then PHYSFADKIT_WORKERS, then the hardware concurrency
    std::size_t resolve_workers(long requested);

} // namespace physfadkit

#endif
