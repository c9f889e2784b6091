#include "ieppa/tomo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ieppa/error.hpp"
#include "ieppa/instance_io.hpp"

namespace ieppa {

GrayImage GrayImage::FromTensor(Tensor3 t) {
  const Dims d = t.dims();
  if (d.n1 != d.n2 || d.n3 != 1) {
    Fail(ErrorKind::kDimensionMismatch, "image must be square with n3 = 1");
  }
  for (double v : t.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      Fail(ErrorKind::kInvalidArgument, "image pixels must be finite and >= 0");
    }
  }
  return GrayImage{d.n1, std::move(t)};
}

double GrayImage::Max() const {
  double m = 0.0;
  for (double v : pixels.values()) m = std::max(m, v);
  return m;
}

// --- PGM ----------------------------------------------------------------------

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string HeaderToken(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

long HeaderNumber(std::istream& in, const std::string& path) {
  const std::string tok = HeaderToken(in);
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorKind::kParse, path + ": bad PGM header field '" + tok + "'");
  }
}

}  // namespace

GrayImage ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  const std::string magic = HeaderToken(in);
  if (magic != "P2" && magic != "P5") {
    Fail(ErrorKind::kParse, path.string() + ": not a P2/P5 PGM file");
  }
  const long w = HeaderNumber(in, path.string());
  const long h = HeaderNumber(in, path.string());
  const long maxval = HeaderNumber(in, path.string());
  if (w != h) Fail(ErrorKind::kInvalidArgument, path.string() + ": image must be square");
  if (maxval > 65535) Fail(ErrorKind::kParse, path.string() + ": maxval above 65535");
  const std::size_t n = static_cast<std::size_t>(w);
  Tensor3 t(Dims{n, n, 1});
  for (std::size_t e = 0; e < t.size(); ++e) {
    long v = 0;
    if (magic == "P2") {
      if (!(in >> v)) Fail(ErrorKind::kParse, path.string() + ": truncated pixel data");
    } else if (maxval < 256) {
      const int c = in.get();
      if (c == EOF) Fail(ErrorKind::kParse, path.string() + ": truncated pixel data");
      v = c;
    } else {
      const int hi = in.get();
      const int lo = in.get();
      if (lo == EOF) Fail(ErrorKind::kParse, path.string() + ": truncated pixel data");
      v = (hi << 8) | lo;
    }
    if (v < 0 || v > maxval) Fail(ErrorKind::kParse, path.string() + ": pixel above maxval");
    t[e] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return GrayImage::FromTensor(std::move(t));
}

void WritePgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ostringstream out;
  out << "P2\n" << img.n << ' ' << img.n << "\n255\n";
  for (std::size_t r = 0; r < img.n; ++r) {
    for (std::size_t c = 0; c < img.n; ++c) {
      const double v = std::clamp(img.pixels(r, c, 0), 0.0, 1.0);
      out << std::lround(v * 255.0) << (c + 1 == img.n ? '\n' : ' ');
    }
  }
  WriteTextFile(path, out.str());
}

// --- directions -----------------------------------------------------------------

std::vector<Direction> ParseDirections(const std::string& text) {
  std::vector<Direction> dirs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    Direction d;
    char comma = 0;
    std::istringstream is(item);
    if (!(is >> d.v1 >> comma >> d.v2) || comma != ',' || !(is >> std::ws).eof()) {
      Fail(ErrorKind::kParse, "bad direction '" + item + "' (expected v1,v2)");
    }
    if (!IsAdmissibleDirection(d)) {
      Fail(ErrorKind::kInvalidArgument, "direction '" + item + "' is not admissible");
    }
    if (std::find(dirs.begin(), dirs.end(), d) != dirs.end()) {
      Fail(ErrorKind::kInvalidArgument, "direction '" + item + "' given twice");
    }
    dirs.push_back(d);
  }
  if (dirs.empty()) Fail(ErrorKind::kInvalidArgument, "no directions given");
  return dirs;
}

std::string FormatDirections(const std::vector<Direction>& dirs) {
  std::string s;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(dirs[i].v1) + "," + std::to_string(dirs[i].v2);
  }
  return s;
}

std::vector<Direction> CanonicalDirections(std::size_t count) {
  std::vector<Direction> out;
  // Two directions give the same lines when they are parallel.
  auto parallel = [](Direction a, Direction b) { return a.v1 * b.v2 == a.v2 * b.v1; };
  for (int p = 0; out.size() < count; ++p) {
    for (Direction d : {Direction{1, p}, Direction{1, -p}, Direction{p, 1}, Direction{p, -1}}) {
      if (out.size() == count) break;
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](Direction o) { return parallel(o, d); });
      if (!dup) out.push_back(d);
    }
  }
  return out;
}

// --- projection -----------------------------------------------------------------

TomoProblem ProjectImage(const GrayImage& img, const std::vector<Direction>& dirs,
                         TomoCost cost) {
  if (dirs.empty()) Fail(ErrorKind::kInvalidArgument, "need at least one direction");
  if (img.Max() <= 0.0) Fail(ErrorKind::kInvalidArgument, "image is all zero");
  const std::size_t n = img.n;
  const Dims dims{n, n, 1};

  TomoProblem prob;
  prob.n = n;
  prob.directions = dirs;
  prob.zero_mask.assign(dims.size(), 0);
  prob.instance.dims = dims;

  Tensor3 c(dims);
  switch (cost) {
    case TomoCost::kSquaredIndexDistance:
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = 0; s < n; ++s) {
          const double d = static_cast<double>(r) - static_cast<double>(s);
          c(r, s, 0) = d * d;
        }
      }
      break;
  }
  const double cmax = *std::max_element(c.values().begin(), c.values().end());
  if (cmax > 0.0) {
    for (double& v : c.values()) v /= cmax;
  }
  prob.instance.cost = std::move(c);

  for (const Direction& d : dirs) {
    const PartitionBlock full = TomoBlock(n, d);
    const std::vector<double> rhs = ApplyBlock(full, img.pixels);
    std::vector<bool> keep(rhs.size());
    std::vector<double> kept;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      keep[j] = rhs[j] > 0.0;
      if (keep[j]) {
        kept.push_back(rhs[j]);
      } else {
        for (auto e : full.row(j)) prob.zero_mask[e] = 1;
      }
    }
    prob.instance.blocks.push_back(full.RestrictRows(keep));
    prob.instance.rhs.push_back(std::move(kept));
  }
  prob.instance.Validate(true);
  return prob;
}

ReducedTomo ReduceTomo(const TomoProblem& prob) {
  const Instance& full = prob.instance;
  ReducedTomo red;
  red.free_index.assign(full.dims.size(), -1);
  std::int64_t k = 0;
  for (std::size_t e = 0; e < full.dims.size(); ++e) {
    if (!prob.zero_mask[e]) red.free_index[e] = k++;
  }
  if (k == 0) Fail(ErrorKind::kInvalidArgument, "every pixel is pinned to zero");
  const Dims dims{static_cast<std::size_t>(k), 1, 1};
  red.instance.dims = dims;
  red.instance.cost = Tensor3(dims);
  for (std::size_t e = 0; e < full.dims.size(); ++e) {
    if (red.free_index[e] >= 0) red.instance.cost[red.free_index[e]] = full.cost[e];
  }
  for (std::size_t i = 0; i < full.blocks.size(); ++i) {
    const PartitionBlock& b = full.blocks[i];
    std::vector<bool> reached(b.m(), false);
    for (std::size_t e = 0; e < full.dims.size(); ++e) {
      if (red.free_index[e] >= 0 && b.label(e) >= 0) reached[b.label(e)] = true;
    }
    for (std::size_t j = 0; j < b.m(); ++j) {
      if (!reached[j]) {
        Fail(ErrorKind::kInfeasible, "projection line with positive sum has only pinned pixels");
      }
    }
    red.instance.blocks.push_back(b.Reindex(dims, red.free_index));
    red.instance.rhs.push_back(full.rhs[i]);
  }
  if (full.upper) {
    Tensor3 u(dims);
    for (std::size_t e = 0; e < full.dims.size(); ++e) {
      if (red.free_index[e] >= 0) u[red.free_index[e]] = (*full.upper)[e];
    }
    red.instance.upper = std::move(u);
  }
  red.instance.Validate(true);
  return red;
}

TomoReconstruction Reconstruct(const TomoProblem& prob, const EppaParams& params) {
  const ReducedTomo red = ReduceTomo(prob);
  TomoReconstruction out;
  out.result = SolveIeppa(red.instance, params);
  Tensor3 img = Tensor3::Zeros(prob.instance.dims);
  for (std::size_t e = 0; e < img.size(); ++e) {
    if (red.free_index[e] >= 0) img[e] = std::max(out.result.x[red.free_index[e]], 0.0);
  }
  out.image = GrayImage::FromTensor(std::move(img));
  return out;
}

double Psnr(const GrayImage& recon, const GrayImage& truth) {
  if (recon.n != truth.n) Fail(ErrorKind::kDimensionMismatch, "psnr: image sizes differ");
  const double peak = truth.Max();
  if (!(peak > 0.0)) Fail(ErrorKind::kInvalidArgument, "psnr: truth image is all zero");
  double err = 0.0;
  for (std::size_t e = 0; e < truth.pixels.size(); ++e) {
    const double d = recon.pixels[e] - truth.pixels[e];
    err += d * d;
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double n2 = static_cast<double>(truth.n * truth.n);
  return 10.0 * std::log10(n2 * peak * peak / err);
}

nlohmann::json TomoToJson(const TomoProblem& prob) {
  nlohmann::json j = InstanceToJson(prob.instance);
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : prob.directions) dirs.push_back({d.v1, d.v2});
  j["tomo"] = {{"n", prob.n}, {"directions", dirs}, {"zero_mask", prob.zero_mask}};
  return j;
}

TomoProblem TomoFromJson(const nlohmann::json& j) {
  TomoProblem prob;
  prob.instance = InstanceFromJson(j);
  if (!j.contains("tomo")) Fail(ErrorKind::kParse, "instance has no \"tomo\" section");
  try {
    const auto& t = j.at("tomo");
    prob.n = t.at("n").get<std::size_t>();
    for (const auto& d : t.at("directions")) {
      prob.directions.push_back({d.at(0).get<int>(), d.at(1).get<int>()});
    }
    prob.zero_mask = t.at("zero_mask").get<std::vector<std::uint8_t>>();
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorKind::kParse, std::string("bad \"tomo\" section: ") + ex.what());
  }
  if (prob.instance.dims != Dims{prob.n, prob.n, 1} ||
      prob.zero_mask.size() != prob.instance.dims.size()) {
    Fail(ErrorKind::kDimensionMismatch, "\"tomo\" section does not match the instance dims");
  }
  return prob;
}

}  // namespace ieppa
