#include "mdit/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdit/error.hpp"
#include "mdit/format.hpp"

namespace mdit::artifacts {

namespace {

constexpr const char* kIndexHeader = "sample,task,provenance,hidden_offset,hidden_rows,label_offset,label_rows";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw CorruptInputError("bad " + what + " value: '" + s + "'");
  }
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_sample_store(const std::filesystem::path& dir, std::span<const embedder::EmbeddedSample> samples,
                        std::size_t dim, std::size_t vocab_size) {
  std::filesystem::create_directories(dir);
  std::size_t rows = 0, label_rows = 0;
  for (const auto& s : samples) {
    if (s.hidden.cols() != dim || s.labels.vocab_size() != vocab_size) {
      throw ConsistencyError("sample shape does not match the store dimensions");
    }
    rows += s.input_len();
    label_rows += s.label_len();
  }

  Tensor hidden{{static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(dim)}, {}};
  Tensor mass{{static_cast<std::uint32_t>(rows)}, {}};
  Tensor labels{{static_cast<std::uint32_t>(label_rows), static_cast<std::uint32_t>(vocab_size)}, {}};
  hidden.values.reserve(rows * dim);
  mass.values.reserve(rows);
  labels.values.assign(label_rows * vocab_size, 0.0f);

  std::ostringstream index;
  index << kIndexHeader << '\n';
  std::size_t row = 0, label_row = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    hidden.values.insert(hidden.values.end(), s.hidden.data().begin(), s.hidden.data().end());
    mass.values.insert(mass.values.end(), s.row_mass.begin(), s.row_mass.end());
    for (std::size_t t = 0; t < s.label_len(); ++t) {
      for (const auto& e : s.labels.row(t)) {
        labels.values[(label_row + t) * vocab_size + e.id] = static_cast<float>(e.weight);
      }
    }
    index << i << ',' << s.task_id << ',' << embedder::to_string(s.provenance) << ',' << row << ','
          << s.input_len() << ',' << label_row << ',' << s.label_len() << '\n';
    row += s.input_len();
    label_row += s.label_len();
  }
  write_tensor(dir / "hidden.mdt", hidden);
  write_tensor(dir / "mass.mdt", mass);
  write_tensor(dir / "labels.mdt", labels);
  write_text(dir / "index.csv", index.str());
}

std::vector<embedder::EmbeddedSample> read_sample_store(const std::filesystem::path& dir) {
  const Tensor hidden = read_tensor(dir / "hidden.mdt");
  const Tensor mass = read_tensor(dir / "mass.mdt");
  const Tensor labels = read_tensor(dir / "labels.mdt");
  if (hidden.dims.size() != 2 || mass.dims.size() != 1 || labels.dims.size() != 2 ||
      mass.dims[0] != hidden.dims[0]) {
    throw CorruptInputError("sample store tensors have inconsistent shapes in " + dir.string());
  }
  const std::size_t dim = hidden.dims[1];
  const std::size_t vocab = labels.dims[1];

  std::ifstream in(dir / "index.csv");
  if (!in) throw IoError("cannot read " + (dir / "index.csv").string());
  std::string line;
  if (!std::getline(in, line) || line != kIndexHeader) {
    throw CorruptInputError("unexpected sample index header in " + dir.string());
  }

  std::vector<embedder::EmbeddedSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7) throw CorruptInputError("bad sample index line: " + line);
    const auto h_off = parse_count(cells[3], "hidden_offset");
    const auto h_rows = parse_count(cells[4], "hidden_rows");
    const auto l_off = parse_count(cells[5], "label_offset");
    const auto l_rows = parse_count(cells[6], "label_rows");
    if (h_off + h_rows > hidden.dims[0] || l_off + l_rows > labels.dims[0]) {
      throw CorruptInputError("sample index points outside the stored tensors");
    }

    embedder::EmbeddedSample s;
    s.task_id = cells[1];
    if (cells[2] == "original") {
      s.provenance = embedder::Provenance::Original;
    } else if (cells[2] == "generated") {
      s.provenance = embedder::Provenance::Generated;
    } else {
      throw CorruptInputError("unknown provenance: " + cells[2]);
    }
    s.hidden = MatrixF(h_rows, dim);
    std::copy_n(hidden.values.begin() + static_cast<std::ptrdiff_t>(h_off * dim), h_rows * dim,
                s.hidden.data().begin());
    s.row_mass.assign(mass.values.begin() + static_cast<std::ptrdiff_t>(h_off),
                      mass.values.begin() + static_cast<std::ptrdiff_t>(h_off + h_rows));
    s.labels = embedder::LabelMatrix(vocab);
    for (std::size_t t = 0; t < l_rows; ++t) {
      std::vector<embedder::LabelEntry> row;
      const float* base = labels.values.data() + (l_off + t) * vocab;
      for (std::size_t c = 0; c < vocab; ++c) {
        if (base[c] != 0.0f) row.push_back({static_cast<corpus::TokenId>(c), base[c]});
      }
      s.labels.push_row(std::move(row));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::span<const interpolator::GeneratedSample> generated) {
  std::ostringstream out;
  for (const auto& g : generated) {
    nlohmann::ordered_json j = {{"lambda", g.lambda},
                                {"parent_i", g.parent_i},
                                {"parent_j", g.parent_j},
                                {"tasks", {g.parent_tasks.first, g.parent_tasks.second}}};
    out << j.dump() << '\n';
  }
  write_text(path, out.str());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.lambda = j.at("lambda").get<double>();
      e.parent_i = j.at("parent_i").get<std::size_t>();
      e.parent_j = j.at("parent_j").get<std::size_t>();
      const auto& tasks = j.at("tasks");
      e.tasks = {tasks.at(0).get<std::string>(), tasks.at(1).get<std::string>()};
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw CorruptInputError("bad manifest line in " + path.string() + ": " + ex.what());
    }
  }
  return out;
}

void write_selection_csv(const std::filesystem::path& path, const diversity::SelectedSet& selection,
                         const diversity::CandidatePool& pool) {
  std::ostringstream out;
  out << "pool_index,provenance,cluster,distance\n";
  for (std::size_t k = 0; k < selection.indices.size(); ++k) {
    const auto i = selection.indices[k];
    out << i << ',' << embedder::to_string(pool.provenance.at(i)) << ',' << selection.clusters[k] << ','
        << format_real(selection.distances[k]) << '\n';
  }
  write_text(path, out.str());
}

std::vector<std::size_t> read_selection_indices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "pool_index,provenance,cluster,distance") {
    throw CorruptInputError("unexpected selection header in " + path.string());
  }
  std::vector<std::size_t> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw CorruptInputError("bad selection line: " + line);
    out.push_back(parse_count(cells[0], "pool_index"));
  }
  return out;
}

}  // namespace mdit::artifacts
