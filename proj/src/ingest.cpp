#include "ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"
#include "json.hpp"

namespace attrscope {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw not_found_error("file_not_found",
                          "cannot open '" + path.string() + "'",
                          path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw validation_error("csv_shape",
                             path.filename().string() + ": row '" + fields[0] +
                                 "' has " + std::to_string(fields.size()) +
                                 " fields, header has " +
                                 std::to_string(table.header.size()),
                             fields[0]);
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) {
    throw validation_error("csv_empty", path.filename().string() + " is empty");
  }
  if (table.header.front() != "image_id") {
    throw validation_error("csv_header",
                           path.filename().string() +
                               ": first column must be 'image_id'");
  }
  return table;
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

Error cell_error(std::string code, const fs::path& file, const std::string& id,
                 std::size_t column, const std::string& what) {
  return validation_error(std::move(code),
                          file.filename().string() + ": " + what +
                              " at (" + id + ", column " +
                              std::to_string(column) + ")",
                          id + ":" + std::to_string(column));
}

void check_attribute_header(const CsvTable& table, const AttributeCatalog& cat,
                            const fs::path& file) {
  if (table.header.size() != cat.size() + 1) {
    throw validation_error("csv_header",
                           file.filename().string() +
                               ": header width does not match attribute count");
  }
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (table.header[i + 1] != cat.name(i)) {
      throw validation_error("csv_header",
                             file.filename().string() + ": column " +
                                 std::to_string(i + 1) + " is '" +
                                 table.header[i + 1] + "', expected '" +
                                 cat.name(i) + "'",
                             table.header[i + 1]);
    }
  }
}

std::unordered_map<std::string, std::size_t> index_rows(const CsvTable& table,
                                                        const fs::path& file) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& id = table.rows[r][0];
    if (!out.emplace(id, r).second) {
      throw validation_error("duplicate_image_id",
                             file.filename().string() + ": duplicate id '" +
                                 id + "'",
                             id);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "write_failed",
                "cannot write '" + path.string() + "'");
  }
  out << content;
}

}  // namespace

AttributeCatalog load_attribute_names(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    names.push_back(line);
  }
  if (names.empty()) {
    throw validation_error("empty_catalog",
                           "attribute file '" + path.string() + "' is empty");
  }
  return AttributeCatalog(std::move(names));
}

DatasetManifest load_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error("invalid_manifest",
                           "manifest is not valid JSON: " +
                               std::string(e.what()));
  }
  const auto base = path.parent_path();
  auto required = [&](const char* key) -> fs::path {
    if (!j.contains(key) || !j[key].is_string()) {
      throw validation_error("invalid_manifest",
                             std::string("manifest field '") + key +
                                 "' missing or not a string",
                             key);
    }
    fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  DatasetManifest m;
  m.name = j.value("name", path.stem().string());
  m.attributes_file = required("attributes_file");
  m.act_file = required("act_file");
  m.prd_file = required("prd_file");
  m.fea_file = required("fea_file");
  if (j.contains("images_dir") && j["images_dir"].is_string()) {
    m.images_dir = required("images_dir");
  }
  return m;
}

Dataset load_dataset(const DatasetManifest& manifest) {
  for (const auto* p : {&manifest.attributes_file, &manifest.act_file,
                        &manifest.prd_file, &manifest.fea_file}) {
    if (!fs::exists(*p)) {
      throw not_found_error("file_not_found",
                            "manifest references missing file '" +
                                p->string() + "'",
                            p->string());
    }
  }
  auto catalog = load_attribute_names(manifest.attributes_file);
  const auto act = read_csv(manifest.act_file);
  const auto prd = read_csv(manifest.prd_file);
  const auto fea = read_csv(manifest.fea_file);
  check_attribute_header(act, catalog, manifest.act_file);
  check_attribute_header(prd, catalog, manifest.prd_file);
  const std::size_t f = fea.header.size() - 1;
  for (std::size_t i = 0; i < f; ++i) {
    if (fea.header[i + 1] != "f" + std::to_string(i)) {
      throw validation_error("csv_header",
                             "fea.csv: column " + std::to_string(i + 1) +
                                 " must be named 'f" + std::to_string(i) + "'",
                             fea.header[i + 1]);
    }
  }

  const auto act_idx = index_rows(act, manifest.act_file);
  const auto prd_idx = index_rows(prd, manifest.prd_file);
  const auto fea_idx = index_rows(fea, manifest.fea_file);

  std::vector<std::string> missing;
  auto diff = [&](const CsvTable& from, const auto& in_index,
                  const fs::path& other) {
    for (const auto& row : from.rows) {
      if (!in_index.contains(row[0])) {
        missing.push_back(row[0] + " (missing from " +
                          other.filename().string() + ")");
      }
    }
  };
  diff(act, prd_idx, manifest.prd_file);
  diff(act, fea_idx, manifest.fea_file);
  diff(prd, act_idx, manifest.act_file);
  diff(fea, act_idx, manifest.act_file);
  if (!missing.empty()) {
    throw validation_error("inconsistent_ids",
                           "image ids differ across files: " + join(missing),
                           join(missing));
  }

  const std::size_t a = catalog.size();
  std::vector<ImageRecord> records;
  records.reserve(act.rows.size());
  for (const auto& act_row : act.rows) {
    ImageRecord rec;
    rec.id = act_row[0];
    if (rec.id.empty()) {
      throw validation_error("empty_image_id", "act.csv: empty image id");
    }
    rec.act.resize(a);
    for (std::size_t c = 1; c <= a; ++c) {
      const auto& cell = act_row[c];
      if (cell == "0") {
        rec.act[c - 1] = 0;
      } else if (cell == "1") {
        rec.act[c - 1] = 1;
      } else {
        throw cell_error("invalid_act", manifest.act_file, rec.id, c,
                         "ACT value '" + cell + "' not in {0,1}");
      }
    }
    const auto& prd_row = prd.rows[prd_idx.at(rec.id)];
    rec.prd.resize(a);
    for (std::size_t c = 1; c <= a; ++c) {
      auto v = parse_double(prd_row[c]);
      if (!v || !(*v >= 0.0 && *v <= 1.0)) {
        throw cell_error("invalid_prd", manifest.prd_file, rec.id, c,
                         "PRD value '" + prd_row[c] + "' not in [0,1]");
      }
      rec.prd[c - 1] = *v;
    }
    const auto& fea_row = fea.rows[fea_idx.at(rec.id)];
    rec.fea.resize(f);
    for (std::size_t c = 1; c <= f; ++c) {
      auto v = parse_double(fea_row[c]);
      if (!v || !std::isfinite(*v)) {
        throw cell_error("invalid_fea", manifest.fea_file, rec.id, c,
                         "FEA value '" + fea_row[c] + "' is not finite");
      }
      rec.fea[c - 1] = *v;
    }
    if (manifest.images_dir) {
      for (const char* ext : {".png", ".jpg"}) {
        auto candidate = *manifest.images_dir / (rec.id + ext);
        if (fs::exists(candidate)) {
          rec.thumbnail = candidate.filename().string();
          break;
        }
      }
    }
    records.push_back(std::move(rec));
  }
  return Dataset(manifest.name, std::move(catalog), std::move(records));
}

DatasetManifest export_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& cat = dataset.catalog();

  std::string names;
  for (const auto& n : cat.names()) names += n + "\n";
  write_file(dir / "attributes.txt", names);

  std::string header = "image_id";
  for (const auto& n : cat.names()) header += "," + n;
  header += "\n";

  std::string act = header;
  std::string prd = header;
  std::string fea = "image_id";
  for (std::size_t i = 0; i < dataset.feature_count(); ++i) {
    fea += ",f" + std::to_string(i);
  }
  fea += "\n";
  for (const auto& r : dataset.records()) {
    act += r.id;
    for (auto v : r.act) act += v ? ",1" : ",0";
    act += "\n";
    prd += r.id;
    for (auto v : r.prd) prd += "," + format_double(v);
    prd += "\n";
    fea += r.id;
    for (auto v : r.fea) fea += "," + format_double(v);
    fea += "\n";
  }
  write_file(dir / "act.csv", act);
  write_file(dir / "prd.csv", prd);
  write_file(dir / "fea.csv", fea);

  nlohmann::json j = {{"name", dataset.name()},
                      {"attributes_file", "attributes.txt"},
                      {"act_file", "act.csv"},
                      {"prd_file", "prd.csv"},
                      {"fea_file", "fea.csv"}};
  write_file(dir / "manifest.json", j.dump(2) + "\n");

  return DatasetManifest{dataset.name(), dir / "attributes.txt",
                         dir / "act.csv", dir / "prd.csv", dir / "fea.csv",
                         std::nullopt};
}

}  // namespace attrscope
