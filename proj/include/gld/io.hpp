#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace gld {

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by a rename, so an
// interrupted run never leaves a half-written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Caps internal parallelism; reads GLD_THREADS, falling back to the hardware
// concurrency. Always >= 1.
int max_threads();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks over at
// most max_threads() workers; fn must only touch slot i of shared state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gld
