#include <stdio.h>
#include <string.h>

#include "monobreak.h"

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: smoke <project> <ops.json>\n");
        return 2;
    }
    MbOptions *opts = mb_options_new();
    if (mb_options_set_ops_path(opts, argv[2]) != MB_STATUS_OK) {
        return 3;
    }
    MbAnalysis *analysis = NULL;
    MbStatus status = mb_analyze(argv[1], opts, &analysis);
    mb_options_free(opts);
    if (status != MB_STATUS_OK) {
        fprintf(stderr, "analyze failed (%d): %s\n", (int)status, mb_last_error_message());
        return 4;
    }
    char *text = NULL;
    if (mb_analysis_render(analysis, MB_FORMAT_TEXT, &text) != MB_STATUS_OK) {
        return 5;
    }
    printf("services=%zu\n%s", mb_analysis_service_count(analysis), text);
    mb_string_free(text);
    mb_analysis_free(analysis);

    status = mb_analyze("/no/such/project", NULL, &analysis);
    printf("missing=%d null=%d\n", (int)status, analysis == NULL);
    return 0;
}
