// Copyright 2026 The pointdet Authors
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

#ifndef POINTDET_SELFTEST_HPP_
#define POINTDET_SELFTEST_HPP_

#include <string>
#include <vector>

namespace pointdet
{

struct SelftestResult
{
  std::string category;  // iou-oracle | pointsiou-oracle | encode-decode | loss
  bool passed = false;
  std::string detail;
};

// Runs the embedded oracle suites with fixed seeds. Every category reports
// one result; the whole run stays well under a minute.
std::vector<SelftestResult> run_selftest();

}  // namespace pointdet

#endif  // POINTDET_SELFTEST_HPP_
