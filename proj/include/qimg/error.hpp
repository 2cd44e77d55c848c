// Copyright 2026 The qimg Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qimg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad index, bad size, bad range).
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// A request exceeds what the simulator can represent (e.g. too many qubits).
class CapacityError : public Error {
   public:
    using Error::Error;
};

/// A state does not have the structure a decoder expects.
class MalformedStateError : public Error {
   public:
    using Error::Error;
};

/// Dataset layout or content problems (empty class, unsplittable class).
class DatasetError : public Error {
   public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
   public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergedTrainingError : public Error {
   public:
    DivergedTrainingError(int epoch, const std::string &what)
        : Error("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

   private:
    int epoch_;
};

}  // namespace qimg
