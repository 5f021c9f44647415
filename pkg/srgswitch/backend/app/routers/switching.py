import logging

from fastapi import APIRouter

from app.errors import SrgSwitchError
from app.routers.graphs import domain_failure, load_graph, summarize
from app.schemas import GmSwitchRequest, GmSwitchResponse, ReplayRequest, SearchReport
from app.services.graphs import two_rank
from app.services.search import named_transcript, replay
from app.services.switching import gm_switch, vertex_set

router = APIRouter(tags=["switching"])
logger = logging.getLogger(__name__)


@router.post("/gm-switch", response_model=GmSwitchResponse)
def gm_switch_route(request: GmSwitchRequest) -> GmSwitchResponse:
    try:
        g = load_graph(request.graph)
        before = two_rank(g)
        switched = gm_switch(g, vertex_set(g, request.set))
        summary = summarize(switched, request.graph.name)
        logger.info(f"gm-switch: {request.set} rank {before} -> {summary.rank}")
        return GmSwitchResponse(graph=summary, rank_before=before, delta=summary.rank - before)
    except SrgSwitchError as e:
        raise domain_failure("gm-switch", e)


@router.post("/replay", response_model=SearchReport)
def replay_route(request: ReplayRequest) -> SearchReport:
    try:
        transcript = request.transcript or named_transcript(request.name)
        return replay(transcript)
    except SrgSwitchError as e:
        raise domain_failure("replay", e)
