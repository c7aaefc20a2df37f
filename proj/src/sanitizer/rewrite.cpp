#include <algorithm>
#include <cctype>
#include <sstream>

#include "internal.hpp"
#include "silc/sanitizer.hpp"

namespace silc {

namespace detail {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool replace_call_token(std::string& line, int column, const std::string& callee, const std::string& name) {
  std::size_t from = column > 0 ? static_cast<std::size_t>(column - 1) : 0;
  for (std::size_t pos = line.find(callee, from); pos != std::string::npos; pos = line.find(callee, pos + 1)) {
    if (pos > 0 && ident_char(line[pos - 1])) continue;
    std::size_t end = pos + callee.size();
    std::size_t k = end;
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    if (k >= line.size() || line[k] != '(') continue;
    if (end < line.size() && ident_char(line[end])) continue;
    line.replace(pos, callee.size(), name);
    return true;
  }
  return false;
}

std::string line_at(const std::string& text, int line) {
  std::istringstream in(text);
  std::string l;
  for (int i = 1; std::getline(in, l); ++i)
    if (i == line) return l;
  return {};
}

}  // namespace detail

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

}  // namespace

SourcePatcher::SourcePatcher(std::string file, const std::string& text)
    : file_(std::move(file)), original_(text), lines_(split_lines(text)) {}

void SourcePatcher::apply(const SanitizerSource& src) {
  if (src.file != file_) throw PatchConflict("sanitizer targets " + src.file + ", not " + file_);
  if (src.call_line < 1 || src.call_line > static_cast<int>(lines_.size()))
    throw PatchConflict(file_ + ":" + std::to_string(src.call_line) + ": no such line");
  if (src.caller_line < 1 || src.caller_line > src.call_line)
    throw PatchConflict(file_ + ":" + std::to_string(src.caller_line) + ": caller does not precede the call");
  if (!done_.insert({src.call_line, src.name}).second)
    throw PatchConflict(src.name + " already applied at line " + std::to_string(src.call_line));
  std::string& line = lines_[static_cast<std::size_t>(src.call_line - 1)];
  if (!detail::replace_call_token(line, src.call_column, src.callee, src.name))
    throw PatchConflict(file_ + ":" + std::to_string(src.call_line) + ": no call to " + src.callee);
  inserts_[src.caller_line] += src.wrapper_text + "\n";
}

std::string SourcePatcher::text() const {
  std::string out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    auto it = inserts_.find(static_cast<int>(i + 1));
    if (it != inserts_.end()) out += it->second;
    out += lines_[i] + "\n";
  }
  return out;
}

std::string SourcePatcher::diff() const { return unified_diff("a/" + file_, "b/" + file_, original_, text()); }

PatchResult rewrite_call_site(const Program& p, const SanitizerSource& src) {
  auto it = p.sources.find(src.file);
  if (it == p.sources.end()) throw PatchConflict("no source text for " + src.file);
  SourcePatcher patcher(src.file, it->second);
  patcher.apply(src);
  return {patcher.text(), patcher.diff()};
}

std::string unified_diff(const std::string& from_name, const std::string& to_name, const std::string& a,
                         const std::string& b, int context) {
  auto x = split_lines(a);
  auto y = split_lines(b);
  std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Op {
    char tag;
    std::size_t i, j;  // positions in x and y before the op
  };
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) {
      ops.push_back({' ', i++, j++});
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', i++, j});
    } else {
      ops.push_back({'+', i, j++});
    }
  }

  std::ostringstream os;
  bool any = false;
  std::size_t k = 0;
  auto ctx = static_cast<std::size_t>(context);
  while (k < ops.size()) {
    if (ops[k].tag == ' ') {
      ++k;
      continue;
    }
    std::size_t start = k >= ctx ? k - ctx : 0;
    std::size_t end = k;
    // Extend over changes separated by at most 2 * context equal lines.
    while (end < ops.size()) {
      if (ops[end].tag != ' ') {
        ++end;
        continue;
      }
      std::size_t run = end;
      while (run < ops.size() && ops[run].tag == ' ') ++run;
      if (run == ops.size() || run - end > 2 * ctx) {
        end = std::min(run, end + ctx);
        break;
      }
      end = run;
    }
    if (!any) {
      os << "--- " << from_name << "\n+++ " << to_name << "\n";
      any = true;
    }
    std::size_t a_len = 0, b_len = 0;
    for (std::size_t q = start; q < end; ++q) {
      if (ops[q].tag != '+') ++a_len;
      if (ops[q].tag != '-') ++b_len;
    }
    std::size_t a0 = ops[start].i + (a_len ? 1 : 0), b0 = ops[start].j + (b_len ? 1 : 0);
    os << "@@ -" << a0 << "," << a_len << " +" << b0 << "," << b_len << " @@\n";
    for (std::size_t q = start; q < end; ++q) {
      const Op& o = ops[q];
      os << o.tag << (o.tag == '+' ? y[o.j] : x[o.i]) << "\n";
    }
    k = end;
  }
  return os.str();
}

}  // namespace silc
