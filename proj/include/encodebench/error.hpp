/******************************************************************************
 * Copyright 2026 The encodebench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace encodebench {

// Root of every error the library throws. The CLI maps any of these to the
// data/validation exit code; usage errors never reach the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Malformed file header or unparsable structured text.
class FormatError : public Error {
public:
	using Error::Error;
};

// Payload shorter or longer than the header promises.
class TruncationError : public Error {
public:
	using Error::Error;
};

// Values that violate a numeric precondition (NaN, constant target, ...).
class DataError : public Error {
public:
	using Error::Error;
};

// Structural inconsistencies: row mismatches, non-contiguous blocks,
// unknown feature spaces, bad fold parameters.
class ValidationError : public Error {
public:
	using Error::Error;
};

} // namespace encodebench
