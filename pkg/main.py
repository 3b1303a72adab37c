"""
QP Reduction FastAPI Application
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

import config
from routers import reductions

config.configure_logging()

# Create FastAPI app
app = FastAPI(
    title="QP Reduction API",
    description="""
    API for decoupling one variable of a quasipolynomial ODE system.

    ## Features
    - Parse `.qp` sources into canonical (A, B, lambda) form
    - Case classification and uniform-Gamma conditions
    - Exact reduction via quasimonomial and new-time transformations
    - Numeric verification by trajectory round-trips

    ## Authentication
    When `QPR_API_KEY` is set every endpoint requires it in the `X-API-Key` header.

    ## Example Usage
    ```bash
    curl -X POST "http://localhost:8000/api/v1/reduce" \\
         -H "Content-Type: application/json" \\
         -d @euler_request.json
    ```
    """,
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(reductions.router)


@app.get("/", tags=["root"])
async def root():
    """Root endpoint"""
    return {
        "message": "QP Reduction API",
        "version": "1.0.0",
        "docs": "/docs",
        "health": "/api/v1/health"
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
