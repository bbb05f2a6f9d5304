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

#ifndef PHYSFADKIT_ERRORS_HPP
#define PHYSFADKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace physfadkit
{
    // Two families of failures. InputError covers anything wrong with what the caller passed in
    // (schema problems, mismatched lengths, invalid physical parameters). NumericError covers
    // breakdowns that happen while computing on valid input.
    class InputError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class NumericError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

#define PHYSFADKIT_DECLARE_ERROR(Name, Base)        \
    class Name : public Base                        \
    {                                               \
    public:                                         \
        explicit Name(const std::string &what_arg)  \
            : Base(std::string(#Name ": ") + what_arg) \
        {                                           \
        }                                           \
    };

    PHYSFADKIT_DECLARE_ERROR(DomainError, InputError)
    PHYSFADKIT_DECLARE_ERROR(LengthMismatch, InputError)
    PHYSFADKIT_DECLARE_ERROR(EnergyConservationViolation, InputError)
    PHYSFADKIT_DECLARE_ERROR(CoincidentPoints, InputError)
    PHYSFADKIT_DECLARE_ERROR(HeterogeneousAlpha, InputError)
    PHYSFADKIT_DECLARE_ERROR(NotHollowSymmetric, InputError)
    PHYSFADKIT_DECLARE_ERROR(SchemaError, InputError)

    PHYSFADKIT_DECLARE_ERROR(SingularMatrix, NumericError)
    PHYSFADKIT_DECLARE_ERROR(NonConvergence, NumericError)
    PHYSFADKIT_DECLARE_ERROR(DivergenceDetected, NumericError)
    PHYSFADKIT_DECLARE_ERROR(NotConvergent, NumericError)
    PHYSFADKIT_DECLARE_ERROR(RankDeficient, NumericError)
    PHYSFADKIT_DECLARE_ERROR(NoDecayDetected, NumericError)
    PHYSFADKIT_DECLARE_ERROR(PlacementExhausted, NumericError)

#undef PHYSFADKIT_DECLARE_ERROR

} // namespace physfadkit

#endif
