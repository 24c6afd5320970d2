#include <stdio.h>
#include <string.h>
#include "claimcheck.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(void) {
    cc_verdict v;
    CHECK(cc_parse_verdict_label("refuted", &v) == CC_OK && v == CC_VERDICT_REFUTED);
    CHECK(cc_extract_judgement("`Supported` then `Not Enough Evidence`", &v) == CC_OK);
    CHECK(v == CC_VERDICT_NOT_ENOUGH_EVIDENCE);
    CHECK(cc_extract_judgement("no label", &v) == CC_ERR_UNPARSEABLE);
    CHECK(cc_last_error_message() != NULL);

    size_t idx[10];
    CHECK(cc_sample_subset_indices(500, 10, 42, idx) == CC_OK);
    CHECK(idx[0] == 413 && idx[1] == 122 && idx[9] == 393);

    cc_pipeline_t *p = NULL;
    CHECK(cc_pipeline_new("{\"backend\": {\"offline\": true}}", &p) == CC_OK && p != NULL);
    cc_report_t *r = NULL;
    CHECK(cc_pipeline_check(p, "Joe Biden voted for the Iraq War.", "2020-10-27", &r) == CC_OK);
    CHECK(cc_report_verdict(r, &v) == CC_OK && v == CC_VERDICT_NOT_ENOUGH_EVIDENCE);
    char *md = NULL;
    CHECK(cc_report_to_markdown(r, &md) == CC_OK);
    CHECK(strncmp(md, "# Fact-Checking Report", 22) == 0);
    cc_string_free(md);
    cc_report_free(r);
    cc_pipeline_free(p);
    puts("ok");
    return 0;
}
