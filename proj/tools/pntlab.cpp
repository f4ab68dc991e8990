#include <cstdio>

#include "pntlab/pntlab.h"

int main(int argc, char** argv) {
  int code = 0;
  char* out = nullptr;
  char* diag = nullptr;
  if (pntlab_run(argc, argv, &code, &out, &diag) != PNTLAB_OK) {
    std::fprintf(stderr, "error: %s\n", pntlab_last_error());
    return 1;
  }
  std::fputs(out, stdout);
  std::fputs(diag, stderr);
  pntlab_string_free(out);
  pntlab_string_free(diag);
  return code;
}
