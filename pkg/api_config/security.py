"""
Security configuration for API authentication
"""
from fastapi import Security, HTTPException, status
from fastapi.security import APIKeyHeader

import config

# API Key configuration
API_KEY_NAME = "X-API-Key"

api_key_header = APIKeyHeader(name=API_KEY_NAME, auto_error=False)


async def verify_api_key(api_key: str = Security(api_key_header)):
    """
    Verify API Key from request header

    The check is skipped when QPR_API_KEY is empty.

    Raises:
        HTTPException: If a key is configured and the header does not match
    """
    if config.QPR_API_KEY and api_key != config.QPR_API_KEY:
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="Invalid or missing API Key"
        )
    return api_key
