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

#ifndef HYBEAM_CSV_HPP
#define HYBEAM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>

#include "types.hpp"

namespace hybeam::csv {

// Fixed shortest-roundtrip-ish formatting so repeated runs produce
// byte-identical files.
inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Writes through a temporary file and renames, so readers never observe a
// partially written output.
inline void atomic_write(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw FileError("cannot open " + tmp + " for writing");
        f << content;
        if (!f)
            throw FileError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw FileError("cannot rename " + tmp + " to " + path);
}

} // namespace hybeam::csv

#endif
