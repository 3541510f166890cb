// Copyright 2026 The exposure_loop Authors.
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

#include "binary_io.h"

#include <string>

namespace exposure_loop::internal {

void write_magic(std::ostream& out, std::string_view magic, std::uint8_t version) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  write_le<std::uint8_t>(out, version);
}

void expect_magic(std::istream& in, std::string_view magic, std::uint8_t version) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || got != magic) {
    throw SnapshotError("bad snapshot magic, expected '" + std::string(magic) + "'");
  }
  const auto v = read_le<std::uint8_t>(in, "version");
  if (v != version) {
    throw SnapshotError("unsupported " + std::string(magic) + " snapshot version " +
                        std::to_string(v) + ", expected " + std::to_string(version));
  }
}

void expect_end(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw SnapshotError("trailing bytes after snapshot payload");
  }
}

}  // namespace exposure_loop::internal
