#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cooc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<std::filesystem::path> out;
};

int cmd_synth(const std::filesystem::path& spec, const GlobalOptions& opts,
              std::ostream& log);
int cmd_fit(const std::filesystem::path& data, const GlobalOptions& opts,
            std::ostream& log);
int cmd_predict(const std::filesystem::path& bundle,
                const std::filesystem::path& data, const GlobalOptions& opts,
                std::ostream& log);
int cmd_sweep(const std::optional<std::filesystem::path>& data,
              const GlobalOptions& opts, std::ostream& log);
int cmd_eval(const std::filesystem::path& data, const GlobalOptions& opts,
             std::ostream& log);

/// Parses argv and dispatches. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& log);

}  // namespace cooc
