#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "flipit/attack_model.h"
#include "flipit/loss.h"
#include "flipit/random.h"

namespace flipit::testing {

// Random attack model with parameters kept in a range where every family has
// visible mass on [0, 12].
inline AttackModel random_model(RandomStream& rng) {
  switch (rng.next_u64() % 4) {
    case 0:
      return AttackModel::weibull(rng.uniform(0.5, 12.0), rng.uniform(0.5, 4.0));
    case 1: {
      const double lo = rng.uniform(0.0, 5.0);
      return AttackModel::uniform(lo, lo + rng.uniform(0.1, 6.0));
    }
    case 2:
      return AttackModel::exponential(rng.uniform(0.05, 2.0));
    default: {
      std::vector<double> s;
      const int n = 1 + static_cast<int>(rng.next_u64() % 30);
      for (int i = 0; i < n; ++i) s.push_back(rng.uniform(0.0, 10.0));
      return AttackModel::empirical(std::move(s));
    }
  }
}

inline LossSpec random_spec(RandomStream& rng, double x_max_norm) {
  const auto flavor = rng.next_u64() % 2 == 0 ? LossFlavor::kBinary : LossFlavor::kLinear;
  return make_loss_spec(flavor, rng.uniform(0.0, 0.5), x_max_norm);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("flipit-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace flipit::testing
