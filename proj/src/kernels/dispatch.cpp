// Copyright 2026 The shadowmm Authors
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

#include <atomic>
#include <stdexcept>

#include "shadowmm/kernels.hpp"

namespace shadowmm::kernels {

#if defined(SHADOWMM_HAVE_AVX2)
const Table& avx2_table_unchecked();
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(SHADOWMM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const Table& avx2_table() {
#if defined(SHADOWMM_HAVE_AVX2)
  if (isa_available(Isa::kAvx2)) return avx2_table_unchecked();
#endif
  throw std::runtime_error("AVX2/FMA kernels are not available on this CPU or build");
}

namespace {

const Table* best_table() {
  if (isa_available(Isa::kAvx2)) return &avx2_table();
  return &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{best_table()};
  return table;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_acquire); }

void force_isa(Isa isa) {
  current().store(isa == Isa::kAvx2 ? &avx2_table() : &scalar_table(), std::memory_order_release);
}

Isa active_isa() { return active().isa; }

}  // namespace shadowmm::kernels
