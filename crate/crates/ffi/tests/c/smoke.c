#include <math.h>
#include <stdio.h>
#include "srg_lab.h"

int main(void) {
    SrgRegion *d = NULL, *lhp = NULL;
    SrgCertificate *cert = NULL;
    SrgVerdict verdict;
    double margin = 0.0;

    if (srg_region_from_json("{\"type\": \"sector_disk\", \"delta\": 0.25, \"epsilon\": 0.25}", &d) != SRG_STATUS_OK)
        return 1;
    if (srg_region_from_json("{\"type\": \"half_plane\", \"bound\": 0.0, \"side\": \"le\"}", &lhp) != SRG_STATUS_OK)
        return 2;
    const char *list = "{\"items\": ["
                       "{\"name\": \"well_posedness\", \"required_by\": [\"hard_separation\"], \"status\": \"asserted_by_user\"},"
                       "{\"name\": \"p_stable\", \"required_by\": [\"hard_separation\"], \"status\": \"asserted_by_user\"}]}";
    if (srg_certify_hard_regions(d, lhp, list, -1.0, &cert) != SRG_STATUS_OK)
        return 3;
    srg_certificate_verdict(cert, &verdict);
    srg_certificate_margin(cert, &margin);
    if (verdict != SRG_VERDICT_CERTIFIED || fabs(margin - 0.25) > 1e-9)
        return 4;

    SrgOperator *op = NULL;
    if (srg_operator_from_json("{\"variant\": \"nope\"}", &op) != SRG_STATUS_INVALID_ARGUMENT)
        return 5;
    if (srg_last_error() == NULL)
        return 6;

    printf("ok %s margin %.3f\n", srg_version(), margin);
    srg_certificate_free(cert);
    srg_region_free(d);
    srg_region_free(lhp);
    return 0;
}
