import logging
from typing import Optional

from fastapi import APIRouter, HTTPException

from app.errors import SrgSwitchError
from app.schemas import (
    GraphInput,
    GraphSummary,
    PredictRankRequest,
    PredictRankResponse,
    RankResponse,
    SrgCheckResponse,
)
from app.services.graphs import Graph, check_srg, graph6_decode, graph6_encode, ones_in_colspace, two_rank
from app.services.product import named_graph, ones_in_colspace_product, predicted_2rank, seidel_product

router = APIRouter(tags=["graphs"])
logger = logging.getLogger(__name__)


def load_graph(source: GraphInput) -> Graph:
    if source.name is not None:
        return named_graph(source.name)
    return graph6_decode(source.graph6)


def summarize(g: Graph, name: Optional[str] = None) -> GraphSummary:
    return GraphSummary(
        name=name,
        n=g.n,
        graph6=graph6_encode(g).decode("ascii"),
        rank=two_rank(g),
        params=check_srg(g),
        ones_in_colspace=ones_in_colspace(g),
    )


def domain_failure(route: str, exc: SrgSwitchError) -> HTTPException:
    logger.error(f"{route}: {exc}")
    return HTTPException(status_code=422, detail=str(exc))


@router.get("/graphs/{name}", response_model=GraphSummary)
def get_graph(name: str) -> GraphSummary:
    try:
        return summarize(named_graph(name), name)
    except SrgSwitchError as e:
        raise domain_failure("graphs", e)


@router.post("/rank", response_model=RankResponse)
def rank(source: GraphInput) -> RankResponse:
    try:
        g = load_graph(source)
        return RankResponse(rank=two_rank(g), ones_in_colspace=ones_in_colspace(g))
    except SrgSwitchError as e:
        raise domain_failure("rank", e)


@router.post("/srg-check", response_model=SrgCheckResponse)
def srg_check(source: GraphInput) -> SrgCheckResponse:
    try:
        return SrgCheckResponse(params=check_srg(load_graph(source)))
    except SrgSwitchError as e:
        raise domain_failure("srg-check", e)


@router.post("/predict-rank", response_model=PredictRankResponse)
def predict_rank(request: PredictRankRequest) -> PredictRankResponse:
    try:
        left, right = load_graph(request.left), load_graph(request.right)
        return PredictRankResponse(
            predicted_rank=predicted_2rank(left, right),
            direct_rank=two_rank(seidel_product(left, right)),
            ones_in_colspace=ones_in_colspace_product(left, right),
        )
    except SrgSwitchError as e:
        raise domain_failure("predict-rank", e)
