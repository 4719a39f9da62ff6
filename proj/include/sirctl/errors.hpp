/*
 * Copyright (C) 2026 The sirctl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SIRCTL_ERRORS_HPP
#define SIRCTL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sirctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violated a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The integrator produced NaN or infinity (usually from a bad policy).
class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// The 2x2 regressor Gram matrix is (numerically) singular.
class SingularRegressors : public Error {
public:
    using Error::Error;
};

/// An event that was required did not happen within the horizon.
class NotReached : public Error {
public:
    using Error::Error;
};

/// A scenario configuration could not be parsed or validated.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace sirctl

#endif // SIRCTL_ERRORS_HPP
