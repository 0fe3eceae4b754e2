from celery import shared_task
import logging

logger = logging.getLogger(__name__)


@shared_task
def fit_candidate_task(payload):
    """Fit one serialized compare candidate and return its comparison row as a dict."""
    # Import here to avoid circular imports
    from estimation.serializers import CandidateSerializer, ComparisonRowSerializer
    from estimation.utilities.comparison import fit_candidate

    serializer = CandidateSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    candidate = serializer.save()
    logger.info(f"Started candidate {candidate['index']}: {candidate['spec'].label}")
    row = fit_candidate(**candidate)
    logger.info(f"Candidate {candidate['index']} completed")
    return dict(ComparisonRowSerializer(row).data)
