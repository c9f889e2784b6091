#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ieppa/constraints.hpp"
#include "ieppa/eppa.hpp"
#include "ieppa/tensor.hpp"

namespace ieppa {

// Square grayscale image, n x n pixels stored as dims (n, n, 1).
struct GrayImage {
  std::size_t n = 0;
  Tensor3 pixels;

  static GrayImage FromTensor(Tensor3 t);
  double Max() const;
};

// Plain or binary PGM (P2 / P5), scaled to [0, 1] by maxval.
GrayImage ReadPgm(const std::filesystem::path& path);
// Plain PGM with maxval 255; values are clamped to [0, 1] first.
void WritePgm(const std::filesystem::path& path, const GrayImage& img);

// "v1,v2;v1,v2;..."
std::vector<Direction> ParseDirections(const std::string& text);
std::string FormatDirections(const std::vector<Direction>& dirs);
// The first `count` distinct directions of the sequence p = 0, 1, 2, ...
// over the forms (1,p), (1,-p), (p,1), (p,-1), with parallel duplicates
// removed: (1,0) (0,1) (1,1) (1,-1) (1,2) (1,-2) (2,1) (2,-1) (1,3) ...
std::vector<Direction> CanonicalDirections(std::size_t count);

enum class TomoCost { kSquaredIndexDistance };

struct TomoProblem {
  std::size_t n = 0;
  std::vector<Direction> directions;
  // One block per direction; rows whose projection is zero are dropped and
  // their entries left uncovered.
  Instance instance;
  // 1 for pixels lying on a dropped (zero) line, forced to 0.
  std::vector<std::uint8_t> zero_mask;
};

TomoProblem ProjectImage(const GrayImage& img, const std::vector<Direction>& dirs,
                         TomoCost cost = TomoCost::kSquaredIndexDistance);

// The LP restricted to the pixels not in the zero mask, dims (K, 1, 1).
// `free_index[p]` is the reduced index of pixel p, or -1.
struct ReducedTomo {
  Instance instance;
  std::vector<std::int64_t> free_index;
};
ReducedTomo ReduceTomo(const TomoProblem& prob);

struct TomoReconstruction {
  GrayImage image;
  IeppaResult result;
};

TomoReconstruction Reconstruct(const TomoProblem& prob, const EppaParams& params);

// 10 log10(n^2 max(truth)^2 / |recon - truth|_F^2); +inf when they match.
double Psnr(const GrayImage& recon, const GrayImage& truth);

// Instance JSON with an extra "tomo" object {"n", "directions", "zero_mask"}.
nlohmann::json TomoToJson(const TomoProblem& prob);
TomoProblem TomoFromJson(const nlohmann::json& j);

}  // namespace ieppa
