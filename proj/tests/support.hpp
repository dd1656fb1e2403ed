#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace mmscatter::testing {

/// Fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir
{
  public:
    explicit ScratchDir(std::string const& tag)
    {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("mmscatter-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(ScratchDir const&) = delete;
    ScratchDir& operator=(ScratchDir const&) = delete;

    std::string file(std::string const& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace mmscatter::testing
