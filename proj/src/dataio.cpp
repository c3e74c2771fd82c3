#include "connsemble/dataio.hpp"

#include "connsemble/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace fs = std::filesystem;

namespace connsemble {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& v) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  return ec == std::errc() && ptr == field.data() + field.size() && !field.empty();
}

std::ifstream open_input(const fs::path& path) {
  if (!fs::exists(path)) raise(Errc::file_not_found, path.string());
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot write " + path.string());
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) raise(Errc::io_error, "failed writing " + path.string());
}

template <class Fn>
void for_each_index(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_at = count;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            // Report the first failing subject in manifest order, not completion order.
            std::lock_guard lock(mu);
            if (i < failed_at) failed_at = i, failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ensure_writable(const fs::path& path, bool overwrite) {
  if (!overwrite && fs::exists(path)) raise(Errc::file_exists, path.string() + " exists (pass overwrite to replace it)");
}

Diagnosis diagnosis_from_string(std::string_view text) {
  if (text == "HC") return Diagnosis::hc;
  if (text == "MCI") return Diagnosis::mci;
  raise(Errc::unknown_label, "label '" + std::string(text) + "' is neither HC nor MCI");
}

std::string_view to_string(Diagnosis d) noexcept { return d == Diagnosis::hc ? "HC" : "MCI"; }

CohortManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in = open_input(manifest_path);
  const fs::path base = manifest_path.parent_path();
  CohortManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    const std::string where = manifest_path.string() + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "subject_id" || fields[1] != "label" || fields[2] != "path")
        raise(Errc::parse_error, where + ": expected header 'subject_id,label,path'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) raise(Errc::parse_error, where + ": expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) raise(Errc::parse_error, where + ": empty subject_id");
    CohortManifest::Entry e;
    e.subject_id = std::string(fields[0]);
    try {
      e.label = diagnosis_from_string(fields[1]);
    } catch (const Error& err) {
      raise(Errc::unknown_label, where + ": subject " + e.subject_id + ": " + err.what());
    }
    fs::path p{std::string(fields[2])};
    e.matrix_path = p.is_relative() ? base / p : p;
    if (!seen.insert(e.subject_id).second)
      raise(Errc::duplicate_subject_id, where + ": subject " + e.subject_id + " listed twice");
    manifest.entries.push_back(std::move(e));
  }
  if (!header_seen) raise(Errc::parse_error, manifest_path.string() + ": empty manifest");
  return manifest;
}

void write_manifest(const CohortManifest& manifest, const fs::path& manifest_path) {
  std::ofstream out = open_output(manifest_path);
  out << "subject_id,label,path\n";
  const fs::path base = manifest_path.parent_path();
  for (const auto& e : manifest.entries) {
    fs::path p = e.matrix_path;
    if (!base.empty() && p.is_absolute() == base.is_absolute()) p = p.lexically_relative(base);
    out << e.subject_id << ',' << to_string(e.label) << ',' << p.generic_string() << '\n';
  }
  close_output(out, manifest_path);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (!parse_double(fields[j], row[j]))
        raise(Errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": field " + std::to_string(j + 1) +
                                     " '" + std::string(fields[j]) + "' is not a number");
    if (!rows.empty() && row.size() != rows.front().size())
      raise(Errc::parse_error, path.string() + ":" + std::to_string(line_no) + ": row has " +
                                   std::to_string(row.size()) + " fields, expected " +
                                   std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  std::ofstream out = open_output(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  close_output(out, path);
}

LabeledCohort build_cohort(const std::vector<ConnectivityMatrix>& matrices, const std::vector<int>& labels,
                           const ExtractionOptions& extraction, int threads) {
  if (matrices.size() != labels.size()) raise(Errc::dimension_mismatch, "matrix count differs from label count");
  if (matrices.empty()) raise(Errc::empty_dataset, "no subjects");
  const Index n = matrices.front().node_count();
  for (const auto& m : matrices)
    if (m.node_count() != n)
      raise(Errc::dimension_mismatch, "subject " + m.subject_id() + " has " + std::to_string(m.node_count()) +
                                          " nodes, expected " + std::to_string(n));

  LabeledCohort cohort;
  cohort.labels = labels;
  const Index m = upper_triangle_size(n);
  for (auto& f : cohort.features) f.resize(static_cast<Index>(matrices.size()), m);
  for (const auto& mat : matrices) cohort.subject_ids.push_back(mat.subject_id());

  for_each_index(matrices.size(), threads, [&](std::size_t i) {
    const auto feats = extract_features(matrices[i], extraction);
    for (std::size_t k = 0; k < 3; ++k) cohort.features[k].row(static_cast<Index>(i)) = feats[k].values.transpose();
  });
  cohort.validate();
  return cohort;
}

LabeledCohort load_cohort(const fs::path& manifest_path, const LoadOptions& options) {
  const CohortManifest manifest = read_manifest(manifest_path);
  if (manifest.entries.empty()) raise(Errc::empty_dataset, manifest_path.string() + " lists no subjects");
  for (const auto& e : manifest.entries)
    if (!fs::exists(e.matrix_path))
      raise(Errc::file_not_found, "subject " + e.subject_id + ": " + e.matrix_path.string());

  std::vector<std::optional<ConnectivityMatrix>> slots(manifest.entries.size());
  for_each_index(manifest.entries.size(), options.threads, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    slots[i] = validate_matrix(read_matrix_csv(e.matrix_path), options.symmetry_tolerance, e.subject_id);
  });
  std::vector<ConnectivityMatrix> matrices;
  std::vector<int> labels;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    matrices.push_back(std::move(*slots[i]));
    labels.push_back(static_cast<int>(manifest.entries[i].label));
  }
  return build_cohort(matrices, labels, options.extraction, options.threads);
}

namespace {

constexpr std::array<const char*, 3> kStoreFiles = {"weights.csv", "shortest_path.csv", "communicability.csv"};

}  // namespace

void write_feature_store(const LabeledCohort& cohort, const fs::path& dir, bool overwrite) {
  cohort.validate();
  for (const char* name : kStoreFiles) ensure_writable(dir / name, overwrite);
  fs::create_directories(dir);
  for (std::size_t k = 0; k < 3; ++k) {
    const fs::path path = dir / kStoreFiles[k];
    std::ofstream out = open_output(path);
    const Matrix& f = cohort.features[k];
    out << "subject_id,label";
    for (Index j = 0; j < f.cols(); ++j) out << ",f" << j;
    out << '\n';
    for (Index i = 0; i < f.rows(); ++i) {
      out << cohort.subject_ids[i] << ',' << to_string(static_cast<Diagnosis>(cohort.labels[i]));
      for (Index j = 0; j < f.cols(); ++j) out << ',' << format_double(f(i, j));
      out << '\n';
    }
    close_output(out, path);
  }
}

LabeledCohort read_feature_store(const fs::path& dir) {
  LabeledCohort cohort;
  for (std::size_t k = 0; k < 3; ++k) {
    const fs::path path = dir / kStoreFiles[k];
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::vector<std::string> ids;
    std::vector<int> labels;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_commas(line);
      const std::string where = path.string() + ":" + std::to_string(line_no);
      if (width == 0) {
        if (fields.size() < 3 || fields[0] != "subject_id" || fields[1] != "label")
          raise(Errc::parse_error, where + ": expected header 'subject_id,label,f0,...'");
        width = fields.size();
        continue;
      }
      if (fields.size() != width)
        raise(Errc::parse_error, where + ": expected " + std::to_string(width) + " fields, got " +
                                     std::to_string(fields.size()));
      ids.emplace_back(fields[0]);
      labels.push_back(static_cast<int>(diagnosis_from_string(fields[1])));
      std::vector<double> row(width - 2);
      for (std::size_t j = 2; j < width; ++j)
        if (!parse_double(fields[j], row[j - 2])) raise(Errc::parse_error, where + ": field " + std::to_string(j + 1));
      rows.push_back(std::move(row));
    }
    if (width == 0) raise(Errc::parse_error, path.string() + ": empty feature file");
    if (k == 0) {
      cohort.subject_ids = ids;
      cohort.labels = labels;
    } else if (ids != cohort.subject_ids || labels != cohort.labels) {
      raise(Errc::parse_error, path.string() + ": subjects or labels differ from " + kStoreFiles[0]);
    }
    Matrix& f = cohort.features[k];
    f.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 2));
    for (Index i = 0; i < f.rows(); ++i)
      for (Index j = 0; j < f.cols(); ++j) f(i, j) = rows[i][j];
  }
  cohort.validate();
  return cohort;
}

}  // namespace connsemble
