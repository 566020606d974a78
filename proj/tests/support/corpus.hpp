#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace nvtest {

inline std::filesystem::path corpusDir() { return NVLANG_CORPUS_DIR; }

inline std::string readFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Sorted .nv files under corpus/<sub>.
inline std::vector<std::filesystem::path> corpusFiles(const std::string& sub) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpusDir() / sub)) {
    if (e.path().extension() == ".nv") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Values of `# key: value` header lines at the top of a corpus file.
inline std::vector<std::string> header(const std::string& source, const std::string& key) {
  std::vector<std::string> out;
  std::istringstream in(source);
  std::string line;
  std::string prefix = "# " + key + ":";
  while (std::getline(in, line) && line.rfind("#", 0) == 0) {
    if (line.rfind(prefix, 0) == 0) {
      std::string v = line.substr(prefix.size());
      if (!v.empty() && v[0] == ' ') v.erase(0, 1);
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace nvtest
