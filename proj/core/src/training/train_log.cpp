#include "medner/training/train_log.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "medner/error.hpp"

namespace medner {

namespace {

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string write_trainlog_csv(const TrainLog& log) {
  std::string out(kTrainLogHeader);
  out += '\n';
  for (const auto& r : log) {
    out += std::to_string(r.epoch) + ',' + g6(r.train_loss) + ',' + g6(r.val_loss) + ',' + g6(r.val_span_f1) + ',' +
           g6(r.learning_rate) + '\n';
  }
  return out;
}

TrainLog parse_trainlog_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kTrainLogHeader) throw FormatError("missing trainlog header", 1);
  TrainLog log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw FormatError("expected 5 columns", line_no);
    TrainLogRow r;
    r.epoch = std::strtoull(cells[0].c_str(), nullptr, 10);
    r.train_loss = std::strtod(cells[1].c_str(), nullptr);
    r.val_loss = std::strtod(cells[2].c_str(), nullptr);
    r.val_span_f1 = std::strtod(cells[3].c_str(), nullptr);
    r.learning_rate = std::strtod(cells[4].c_str(), nullptr);
    log.push_back(r);
  }
  return log;
}

}  // namespace medner
